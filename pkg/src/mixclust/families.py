"""Per-coordinate distribution families.

Every family works on numpy arrays and broadcasts: ``logpdf(x, p)`` takes
``p`` with trailing axis of length ``n_params`` (location/scale pairs for
Laplace and diagonal Gaussian, a single mean-form parameter otherwise).

Exponential-family kinds additionally expose the cumulant ``psi`` on the
natural parameter, its Legendre conjugate ``psi_star`` on the mean
parameter, and the Bregman divergence generated by ``psi_star``.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, xlogy

LOG_2PI = math.log(2.0 * math.pi)
MEAN_FLOOR = 1e-8


class Kind(str, Enum):
    GAUSSIAN_EQUAL_VAR = "gaussian_equal_var"
    GAUSSIAN_DIAGONAL = "gaussian"
    LAPLACE = "laplace"
    POISSON = "poisson"
    NEG_BINOMIAL = "negbin"
    CUSTOM = "custom"


class Family:
    """Base class; subclasses fill in the kind-specific pieces."""

    kind: Kind
    n_params: int = 1
    expfam: bool = False
    discrete: bool = False
    fixed_shape: Optional[float] = None

    # -- density & sampling -------------------------------------------------
    def logpdf(self, x, p):
        raise NotImplementedError

    def sample(self, p, rng: np.random.Generator):
        """Draw one value per row of ``p`` (shape ``(m, n_params)``)."""
        raise NotImplementedError

    def mean(self, p):
        raise NotImplementedError

    def var(self, p):
        raise NotImplementedError

    def validate(self, p) -> None:
        """Raise ValueError if any parameter lies outside the family's domain."""

    def validate_data(self, x) -> None:
        if not np.all(np.isfinite(x)):
            raise ValueError(f"{self.name}: non-finite observations")

    def scale_hint(self, p) -> np.ndarray:
        """Typical spread, used to size integration windows."""
        return np.sqrt(self.var(p))

    # -- exponential-family machinery ----------------------------------------
    def u(self, x):
        return np.asarray(x, dtype=float)

    def psi(self, theta):
        raise TypeError(f"{self.name} is not an exponential family")

    def grad_psi(self, theta):
        raise TypeError(f"{self.name} is not an exponential family")

    def psi_star(self, mu):
        raise TypeError(f"{self.name} is not an exponential family")

    def grad_psi_star(self, mu):
        raise TypeError(f"{self.name} is not an exponential family")

    def hess_psi_star(self, mu):
        raise TypeError(f"{self.name} is not an exponential family")

    def to_natural(self, p):
        """Natural parameter from a stored (mean-form) parameter."""
        return self.grad_psi_star(self.to_mean(p))

    def to_mean(self, p):
        raise TypeError(f"{self.name} is not an exponential family")

    def from_mean(self, mu):
        """Stored parameter (shape ``(..., 1)``) from a mean parameter."""
        raise TypeError(f"{self.name} is not an exponential family")

    def in_natural_domain(self, theta) -> bool:
        return bool(np.all(np.isfinite(theta)))

    def mean_domain(self) -> tuple[float, float]:
        return (-np.inf, np.inf)

    def clamp_mean(self, mu):
        lo, hi = self.mean_domain()
        return np.clip(mu, lo, hi)

    def bregman(self, x, y):
        """Breg_{psi*}(x || y) = psi*(x) - psi*(y) - (x - y) * grad psi*(y)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.psi_star(x) - self.psi_star(y) - (x - y) * self.grad_psi_star(y)

    @property
    def name(self) -> str:
        if self.fixed_shape is None:
            return self.kind.value
        return f"{self.kind.value}:{self.fixed_shape:g}"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.name == other.name

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.name))


class Laplace(Family):
    kind = Kind.LAPLACE
    n_params = 2

    def logpdf(self, x, p):
        p = np.asarray(p, dtype=float)
        loc, scale = p[..., 0], p[..., 1]
        return -np.log(2.0 * scale) - np.abs(x - loc) / scale

    def sample(self, p, rng):
        p = np.asarray(p, dtype=float)
        # inverse CDF on a uniform in (-1/2, 1/2)
        v = rng.random(p.shape[0]) - 0.5
        return p[:, 0] - p[:, 1] * np.sign(v) * np.log1p(-2.0 * np.abs(v))

    def mean(self, p):
        return np.asarray(p, dtype=float)[..., 0]

    def var(self, p):
        return 2.0 * np.asarray(p, dtype=float)[..., 1] ** 2

    def validate(self, p):
        p = np.asarray(p, dtype=float)
        if not np.all(np.isfinite(p)):
            raise ValueError("laplace: non-finite parameter")
        if np.any(p[..., 1] <= 0):
            raise ValueError("laplace: scale must be > 0")


class GaussianDiagonal(Family):
    """Gaussian with per-cluster location and standard deviation."""

    kind = Kind.GAUSSIAN_DIAGONAL
    n_params = 2

    def logpdf(self, x, p):
        p = np.asarray(p, dtype=float)
        loc, scale = p[..., 0], p[..., 1]
        return -0.5 * LOG_2PI - np.log(scale) - 0.5 * ((x - loc) / scale) ** 2

    def sample(self, p, rng):
        p = np.asarray(p, dtype=float)
        return p[:, 0] + p[:, 1] * rng.standard_normal(p.shape[0])

    def mean(self, p):
        return np.asarray(p, dtype=float)[..., 0]

    def var(self, p):
        return np.asarray(p, dtype=float)[..., 1] ** 2

    def validate(self, p):
        p = np.asarray(p, dtype=float)
        if not np.all(np.isfinite(p)):
            raise ValueError("gaussian: non-finite parameter")
        if np.any(p[..., 1] <= 0):
            raise ValueError("gaussian: scale must be > 0")


class GaussianEqualVar(Family):
    """Gaussian with known standard deviation shared by all clusters.

    Stored parameter is the mean; theta = mu / sigma**2.
    """

    kind = Kind.GAUSSIAN_EQUAL_VAR
    expfam = True

    def __init__(self, sigma: float = 1.0):
        if not sigma > 0:
            raise ValueError("gaussian_equal_var: sigma must be > 0")
        self.fixed_shape = float(sigma)

    @property
    def s2(self) -> float:
        return self.fixed_shape**2

    def logpdf(self, x, p):
        mu = np.asarray(p, dtype=float)[..., 0]
        return -0.5 * LOG_2PI - math.log(self.fixed_shape) - 0.5 * (x - mu) ** 2 / self.s2

    def sample(self, p, rng):
        p = np.asarray(p, dtype=float)
        return p[:, 0] + self.fixed_shape * rng.standard_normal(p.shape[0])

    def mean(self, p):
        return np.asarray(p, dtype=float)[..., 0]

    def var(self, p):
        return np.full(np.shape(self.mean(p)), self.s2)

    def validate(self, p):
        if not np.all(np.isfinite(p)):
            raise ValueError("gaussian_equal_var: non-finite parameter")

    def psi(self, theta):
        return 0.5 * self.s2 * np.asarray(theta, dtype=float) ** 2

    def grad_psi(self, theta):
        return self.s2 * np.asarray(theta, dtype=float)

    def psi_star(self, mu):
        return 0.5 * np.asarray(mu, dtype=float) ** 2 / self.s2

    def grad_psi_star(self, mu):
        return np.asarray(mu, dtype=float) / self.s2

    def hess_psi_star(self, mu):
        return np.full(np.shape(mu), 1.0 / self.s2)

    def to_mean(self, p):
        return np.asarray(p, dtype=float)[..., 0]

    def from_mean(self, mu):
        return np.asarray(mu, dtype=float)[..., None]

    def bregman(self, x, y):
        x = np.asarray(x, dtype=float)
        return 0.5 * (x - y) ** 2 / self.s2


class Poisson(Family):
    kind = Kind.POISSON
    expfam = True
    discrete = True

    def logpdf(self, x, p):
        lam = np.asarray(p, dtype=float)[..., 0]
        return xlogy(x, lam) - lam - gammaln(np.asarray(x, dtype=float) + 1.0)

    def sample(self, p, rng):
        return rng.poisson(np.asarray(p, dtype=float)[:, 0]).astype(float)

    def mean(self, p):
        return np.asarray(p, dtype=float)[..., 0]

    def var(self, p):
        return self.mean(p)

    def validate(self, p):
        p = np.asarray(p, dtype=float)
        if not np.all(np.isfinite(p)) or np.any(p[..., 0] <= 0):
            raise ValueError("poisson: rate must be finite and > 0")

    def validate_data(self, x):
        super().validate_data(x)
        if np.any(x < 0) or np.any(x != np.round(x)):
            raise ValueError("poisson: observations must be nonnegative integers")

    def psi(self, theta):
        return np.exp(theta)

    def grad_psi(self, theta):
        return np.exp(theta)

    def psi_star(self, mu):
        mu = np.asarray(mu, dtype=float)
        if np.any(mu < 0):
            raise ValueError("poisson: psi* undefined for negative arguments")
        return xlogy(mu, mu) - mu

    def grad_psi_star(self, mu):
        return np.log(mu)

    def hess_psi_star(self, mu):
        return 1.0 / np.asarray(mu, dtype=float)

    def to_mean(self, p):
        return np.asarray(p, dtype=float)[..., 0]

    def from_mean(self, mu):
        return np.asarray(mu, dtype=float)[..., None]

    def mean_domain(self):
        return (MEAN_FLOOR, np.inf)

    def bregman(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(x < 0) or np.any(y <= 0):
            raise ValueError("poisson: Bregman divergence needs x >= 0 and y > 0")
        return xlogy(x, x / y) - x + y


class NegBinomial(Family):
    """Negative binomial with known dispersion ``r``.

    pmf(x) = C(x + r - 1, x) p**x (1 - p)**r, so theta = log p < 0,
    psi(theta) = -r log(1 - e^theta) and the mean is r p / (1 - p).
    The stored parameter is p.
    """

    kind = Kind.NEG_BINOMIAL
    expfam = True
    discrete = True

    def __init__(self, r: float):
        if not r > 0:
            raise ValueError("negbin: dispersion r must be > 0")
        self.fixed_shape = float(r)

    def logpdf(self, x, p):
        q = np.asarray(p, dtype=float)[..., 0]
        r = self.fixed_shape
        x = np.asarray(x, dtype=float)
        return (gammaln(x + r) - gammaln(r) - gammaln(x + 1.0)
                + xlogy(x, q) + r * np.log1p(-q))

    def sample(self, p, rng):
        q = np.asarray(p, dtype=float)[:, 0]
        # numpy counts failures before r successes with success prob 1 - q
        return rng.negative_binomial(self.fixed_shape, 1.0 - q).astype(float)

    def mean(self, p):
        q = np.asarray(p, dtype=float)[..., 0]
        return self.fixed_shape * q / (1.0 - q)

    def var(self, p):
        q = np.asarray(p, dtype=float)[..., 0]
        return self.fixed_shape * q / (1.0 - q) ** 2

    def validate(self, p):
        q = np.asarray(p, dtype=float)[..., 0]
        if not np.all((q > 0) & (q < 1)):
            raise ValueError("negbin: p must lie in (0, 1)")

    def validate_data(self, x):
        super().validate_data(x)
        if np.any(x < 0) or np.any(x != np.round(x)):
            raise ValueError("negbin: observations must be nonnegative integers")

    def psi(self, theta):
        theta = np.asarray(theta, dtype=float)
        return -self.fixed_shape * np.log(-np.expm1(theta))

    def grad_psi(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.fixed_shape * np.exp(theta) / -np.expm1(theta)

    def psi_star(self, mu):
        mu = np.asarray(mu, dtype=float)
        if np.any(mu < 0):
            raise ValueError("negbin: psi* undefined for negative arguments")
        r = self.fixed_shape
        return xlogy(mu, mu / (r + mu)) + r * np.log(r / (r + mu))

    def grad_psi_star(self, mu):
        mu = np.asarray(mu, dtype=float)
        return np.log(mu / (self.fixed_shape + mu))

    def hess_psi_star(self, mu):
        mu = np.asarray(mu, dtype=float)
        r = self.fixed_shape
        return r / (mu * (r + mu))

    def to_mean(self, p):
        return self.mean(p)

    def from_mean(self, mu):
        mu = np.asarray(mu, dtype=float)
        return (mu / (self.fixed_shape + mu))[..., None]

    def in_natural_domain(self, theta):
        return bool(np.all(np.asarray(theta) < 0))

    def mean_domain(self):
        return (MEAN_FLOOR, np.inf)

    def bregman(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(x < 0) or np.any(y <= 0):
            raise ValueError("negbin: Bregman divergence needs x >= 0 and y > 0")
        return super().bregman(x, y)


class CustomExpFamily(Family):
    """User-supplied one-parameter exponential family.

    The stored parameter is the natural parameter theta. ``psi_star`` and
    ``hess_psi_star`` default to values derived from ``psi`` and the inverse
    map ``grad_psi_star``.
    """

    kind = Kind.CUSTOM
    expfam = True

    def __init__(
        self,
        name: str,
        psi: Callable,
        grad_psi: Callable,
        grad_psi_star: Callable,
        log_h: Callable,
        sampler: Callable,
        u: Callable = lambda x: np.asarray(x, dtype=float),
        psi_star: Optional[Callable] = None,
        hess_psi_star: Optional[Callable] = None,
        mean_domain: tuple[float, float] = (-np.inf, np.inf),
        natural_domain: tuple[float, float] = (-np.inf, np.inf),
        discrete: bool = False,
    ):
        self.label = name
        self._psi = psi
        self._grad_psi = grad_psi
        self._grad_psi_star = grad_psi_star
        self._psi_star = psi_star
        self._hess_psi_star = hess_psi_star
        self._log_h = log_h
        self._sampler = sampler
        self._u = u
        self._mean_domain = mean_domain
        self._natural_domain = natural_domain
        self.discrete = discrete

    @property
    def name(self) -> str:
        return f"custom:{self.label}"

    def logpdf(self, x, p):
        theta = np.asarray(p, dtype=float)[..., 0]
        return self._log_h(x) + self.u(x) * theta - self.psi(theta)

    def sample(self, p, rng):
        return np.asarray(self._sampler(np.asarray(p, dtype=float)[:, 0], rng), dtype=float)

    def mean(self, p):
        return self.grad_psi(np.asarray(p, dtype=float)[..., 0])

    def var(self, p):
        return 1.0 / self.hess_psi_star(self.mean(p))

    def validate(self, p):
        if not self.in_natural_domain(np.asarray(p, dtype=float)[..., 0]):
            raise ValueError(f"{self.name}: natural parameter outside its domain")

    def u(self, x):
        return np.asarray(self._u(x), dtype=float)

    def psi(self, theta):
        return np.asarray(self._psi(np.asarray(theta, dtype=float)), dtype=float)

    def grad_psi(self, theta):
        return np.asarray(self._grad_psi(np.asarray(theta, dtype=float)), dtype=float)

    def grad_psi_star(self, mu):
        return np.asarray(self._grad_psi_star(np.asarray(mu, dtype=float)), dtype=float)

    def psi_star(self, mu):
        mu = np.asarray(mu, dtype=float)
        if self._psi_star is not None:
            return np.asarray(self._psi_star(mu), dtype=float)
        theta = self.grad_psi_star(mu)
        return theta * mu - self.psi(theta)

    def hess_psi_star(self, mu):
        mu = np.asarray(mu, dtype=float)
        if self._hess_psi_star is not None:
            return np.asarray(self._hess_psi_star(mu), dtype=float)
        return 1.0 / self._num_hess_psi(self.grad_psi_star(mu))

    def _num_hess_psi(self, theta, h=1e-5):
        return (self.grad_psi(theta + h) - self.grad_psi(theta - h)) / (2 * h)

    def to_natural(self, p):
        return np.asarray(p, dtype=float)[..., 0]

    def to_mean(self, p):
        return self.grad_psi(self.to_natural(p))

    def from_mean(self, mu):
        return self.grad_psi_star(mu)[..., None]

    def in_natural_domain(self, theta):
        lo, hi = self._natural_domain
        theta = np.asarray(theta, dtype=float)
        return bool(np.all((theta > lo) & (theta < hi)))

    def mean_domain(self):
        return self._mean_domain


_SIMPLE = {
    "laplace": Laplace,
    "gaussian": GaussianDiagonal,
    "gaussian_diagonal": GaussianDiagonal,
    "poisson": Poisson,
}


def parse_family(text: str) -> Family:
    """Build a family from ``name`` or ``name:shape``.

    >>> parse_family("negbin:5").fixed_shape
    5.0
    """
    name, _, shape = text.strip().lower().partition(":")
    if name in _SIMPLE:
        if shape:
            raise ValueError(f"family {name!r} takes no shape parameter")
        return _SIMPLE[name]()
    if name in ("gaussian_equal_var", "gaussian_eq"):
        return GaussianEqualVar(float(shape) if shape else 1.0)
    if name in ("negbin", "negative_binomial", "nb"):
        if not shape:
            raise ValueError("negbin needs a dispersion, e.g. negbin:5")
        return NegBinomial(float(shape))
    raise ValueError(f"unknown family {text!r}")
