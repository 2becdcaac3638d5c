"""Clustering of parametric mixture models at the Chernoff-information rate."""

from .cluster import (
    ClusterResult,
    bregman_div,
    bregman_hard_cluster,
    error_decomposition,
    iterative_cluster,
    oracle_classify,
    pairwise_test_error,
)
from .divergence import (
    ChernoffResult,
    chernoff_family,
    chernoff_pair,
    gaussian_chernoff_closed,
    quadrature_chernoff,
    renyi,
)
from .estimate import expfam_fit, laplace_fit
from .families import (
    CustomExpFamily,
    GaussianDiagonal,
    GaussianEqualVar,
    Laplace,
    NegBinomial,
    Poisson,
    parse_family,
)
from .loss import LossReport, brute_force_loss, loss
from .model import MixtureSpec, log_density, make_labels, sample_dataset
from .spectral import SpectralConfig, spectral_init

__version__ = "0.1.0"

__all__ = [
    "ClusterResult",
    "bregman_div",
    "bregman_hard_cluster",
    "error_decomposition",
    "iterative_cluster",
    "oracle_classify",
    "pairwise_test_error",
    "ChernoffResult",
    "chernoff_family",
    "chernoff_pair",
    "gaussian_chernoff_closed",
    "quadrature_chernoff",
    "renyi",
    "expfam_fit",
    "laplace_fit",
    "CustomExpFamily",
    "GaussianDiagonal",
    "GaussianEqualVar",
    "Laplace",
    "NegBinomial",
    "Poisson",
    "parse_family",
    "LossReport",
    "brute_force_loss",
    "loss",
    "MixtureSpec",
    "log_density",
    "make_labels",
    "sample_dataset",
    "SpectralConfig",
    "spectral_init",
]
