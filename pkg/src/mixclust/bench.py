"""Monte Carlo experiment harness.

Each replicate draws balanced labels and a dataset, builds an initial
labelling, runs the requested algorithms and scores them. Records are
written as CSV in replicate order whatever the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .cluster import bregman_hard_cluster, default_tmax, iterative_cluster, oracle_classify
from .config import ConfigError, SpecFile
from .divergence import ChernoffResult, chernoff_family
from .loss import loss
from .model import MixtureSpec, make_labels, make_rng, sample_dataset
from .spectral import SpectralConfig, spectral_init

CSV_VERSION_LINE = "# mixclust-csv v1"
COLUMNS = (
    "replicate", "algo", "family", "n", "d", "k", "chernoff", "t_star",
    "mistakes", "rate", "log_rate_ratio", "iterations", "wall_ms",
)
ALGOS = ("oracle", "likelihood", "bregman", "spectral_only")
JOBS_ENV = "MIXCLUST_JOBS"

_CORRUPTED = re.compile(r"^corrupted\(\s*([0-9.eE+-]+)\s*\)$")


@dataclass(frozen=True)
class InitPolicy:
    kind: str  # truth | spectral | corrupted
    rho: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "InitPolicy":
        text = text.strip()
        if text in ("truth", "spectral"):
            return cls(text)
        m = _CORRUPTED.match(text)
        if m:
            rho = float(m.group(1))
            if not 0.0 <= rho < 0.5:
                raise ValueError("corrupted(rho) needs rho in [0, 0.5)")
            return cls("corrupted", rho)
        raise ValueError(f"unknown init policy {text!r}")

    def __str__(self) -> str:
        return f"corrupted({self.rho:g})" if self.kind == "corrupted" else self.kind


@dataclass(frozen=True)
class ExperimentConfig:
    spec: MixtureSpec
    n: int
    alpha: float = 1.0
    algos: tuple = ("oracle", "likelihood")
    init: InitPolicy = InitPolicy("spectral")
    t_max: Optional[int] = None
    replicates: int = 1
    master_seed: int = 0
    output_path: Optional[str] = None
    restarts: int = 10
    lloyd_iters: int = 20
    timing: bool = True

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        unknown = [a for a in self.algos if a not in ALGOS]
        if unknown:
            raise ValueError(f"unknown algorithm(s): {', '.join(unknown)}")
        if "bregman" in self.algos and not self.spec.expfam:
            raise ValueError("bregman needs every coordinate to be an exponential family")

    @property
    def tmax(self) -> int:
        return self.t_max if self.t_max is not None else default_tmax(self.n)


@dataclass
class RunRecord:
    replicate: object
    algo: str
    family: str
    n: int
    d: int
    k: int
    chernoff: float
    t_star: float
    mistakes: float
    rate: float
    log_rate_ratio: float
    iterations: float
    wall_ms: float


def log_rate_ratio(rate: float, n: int, chernoff_value: float) -> float:
    if chernoff_value <= 0:
        return math.nan
    return math.log(max(rate, 1.0 / n)) / -chernoff_value


def corrupt_labels(z, k: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """Move floor(rho n) randomly chosen points to a uniformly drawn wrong label."""
    z = np.array(z, dtype=np.int64)
    m = int(math.floor(rho * z.size))
    idx = rng.choice(z.size, size=m, replace=False)
    shift = rng.integers(1, k, size=m)
    z[idx] = (z[idx] + shift) % k
    return z


def replicate_seeds(master_seed: int, r: int) -> tuple:
    """Independent integer seeds for labels, data, init and corruption."""
    state = np.random.SeedSequence([master_seed, r]).generate_state(4, dtype=np.uint32)
    return tuple(int(s) for s in state)


def run_replicate(cfg: ExperimentConfig, r: int, cher: ChernoffResult) -> list[RunRecord]:
    spec = cfg.spec
    k = spec.k
    s_labels, s_data, s_init, s_corrupt = replicate_seeds(cfg.master_seed, r)
    z = make_labels(cfg.n, k, cfg.alpha, s_labels)
    X = sample_dataset(spec, z, s_data)
    spectral_cfg = SpectralConfig(k, cfg.restarts, cfg.lloyd_iters, s_init, apply_sufficient_stat=spec.expfam)

    spectral_labels = None
    spectral_ms = 0.0

    def spectral():
        nonlocal spectral_labels, spectral_ms
        if spectral_labels is None:
            t0 = time.perf_counter()
            spectral_labels = spectral_init(X, spectral_cfg, spec.families)
            spectral_ms = 1000.0 * (time.perf_counter() - t0)
        return spectral_labels

    if cfg.init.kind == "truth":
        z0 = z
    elif cfg.init.kind == "spectral":
        z0 = spectral()
    else:
        z0 = corrupt_labels(z, k, cfg.init.rho, make_rng(s_corrupt))

    records = []
    for algo in cfg.algos:
        t0 = time.perf_counter()
        if algo == "oracle":
            labels, iters = oracle_classify(X, spec), 0
        elif algo == "spectral_only":
            labels, iters = spectral(), 0
        else:
            run = iterative_cluster if algo == "likelihood" else bregman_hard_cluster
            result = run(X, spec.families, k, z0, cfg.tmax)
            labels, iters = result.labels, result.iterations_run
        elapsed = 1000.0 * (time.perf_counter() - t0)
        if algo == "spectral_only":
            elapsed = spectral_ms
        report = loss(z, labels, k)
        records.append(RunRecord(
            r, algo, spec.family_name(), cfg.n, spec.d, k, cher.value, cher.t_star,
            report.mistakes, report.rate, log_rate_ratio(report.rate, cfg.n, cher.value),
            iters, elapsed if cfg.timing else 0.0,
        ))
    return records


def _run_one(args):
    cfg, r, cher = args
    return run_replicate(cfg, r, cher)


def resolve_jobs(jobs: Optional[int]) -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            jobs = int(env)
        except ValueError:
            raise ValueError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
    return max(1, jobs or 1)


def run_experiment(cfg: ExperimentConfig, jobs: Optional[int] = None):
    """Run every replicate; returns ``(records, summary_rows)``."""
    cher = chernoff_family(cfg.spec)
    jobs = resolve_jobs(jobs)
    tasks = [(cfg, r, cher) for r in range(cfg.replicates)]
    if jobs == 1:
        chunks = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_one, tasks))
    records = [rec for chunk in chunks for rec in chunk]
    return records, summarize(records)


def summarize(records: list[RunRecord]) -> list[RunRecord]:
    out = []
    for algo in dict.fromkeys(rec.algo for rec in records):
        rows = [rec for rec in records if rec.algo == algo]
        first = rows[0]
        out.append(replace(
            first,
            replicate="summary",
            mistakes=statistics.fmean(r.mistakes for r in rows),
            rate=statistics.fmean(r.rate for r in rows),
            log_rate_ratio=statistics.median(r.log_rate_ratio for r in rows),
            iterations=statistics.fmean(r.iterations for r in rows),
            wall_ms=statistics.fmean(r.wall_ms for r in rows),
        ))
    return out


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(records, summary) -> str:
    buf = io.StringIO()
    buf.write(CSV_VERSION_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for rec in list(records) + list(summary):
        writer.writerow([_fmt(getattr(rec, c)) for c in COLUMNS])
    return buf.getvalue()


def write_csv(path, records, summary) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(records, summary))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def config_from_specfile(sf: SpecFile, source: str = "<config>", **overrides) -> ExperimentConfig:
    """Experiment settings from a spec file's bench keys, then ``overrides``."""
    if sf.spec is None:
        raise ConfigError("benchmark needs a complete parameter grid", None, source)
    kw: dict = {}
    for key, (value, line) in sf.extras.items():
        try:
            if key == "algos":
                kw["algos"] = tuple(a.strip() for a in value.split(",") if a.strip())
            elif key == "init":
                kw["init"] = InitPolicy.parse(value)
            elif key == "tmax":
                kw["t_max"] = int(value)
            elif key == "replicates":
                kw["replicates"] = int(value)
            elif key == "master_seed":
                kw["master_seed"] = int(value)
            elif key == "output":
                kw["output_path"] = value
            elif key == "restarts":
                kw["restarts"] = int(value)
        except ValueError as exc:
            raise ConfigError(str(exc), line, source) from None
    kw.setdefault("master_seed", sf.seed)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    if sf.n is None and "n" not in kw:
        raise ConfigError("benchmark needs 'n'", None, source)
    kw.setdefault("n", sf.n)
    kw.setdefault("alpha", sf.alpha)
    try:
        return ExperimentConfig(spec=sf.spec, **kw)
    except ValueError as exc:
        line = sf.extras.get("algos", (None, None))[1]
        raise ConfigError(str(exc), line, source) from None
