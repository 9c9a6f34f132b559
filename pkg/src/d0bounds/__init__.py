"""Smooth 0-divergence and the finite-blocklength channel coding bounds built on it."""

from .bounds import (
    BoundPoint,
    achievability_bound,
    achievability_error,
    converse_bound,
    converse_sup_search,
    dt_bsc,
    gallager_bsc,
    gallager_e0,
    np_converse_bsc,
    rcu_bsc,
)
from .channels import (
    BscChannel,
    DenseChannel,
    bsc_dense,
    bsc_spectrum,
    joint_spectrum,
    load_channel,
    memoryless_extension,
)
from .distributions import (
    LOG_ZERO,
    FiniteDistribution,
    log_binomial_pmf,
    log_sum_exp2,
    normalize,
    uniform,
)
from .divergence import (
    D0Result,
    RatioSpectrum,
    ThresholdTest,
    apply_kernel,
    build_spectrum,
    convolve_spectra,
    d0,
    d0_smooth,
    kl_divergence,
    self_convolve,
)

__version__ = "0.1.0"
