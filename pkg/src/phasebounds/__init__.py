"""Entropic bounds and Monte Carlo simulation for quantum phase estimation."""

from .asymmetry import (
    dephase,
    dephased_entropy,
    g_asymmetry,
    generator_distribution,
    generator_entropy,
    generator_variance,
    relative_entropy,
    vn_entropy,
)
from .bounds import (
    UNIFORM,
    BoundReport,
    PriorDistribution,
    bound_report,
    error_lower_bound,
    gridded_prior,
    local_precision_lower,
    multimode_entropy_cap,
    prior_entropy,
    rate_distortion_floor,
    scheme_bound,
    uniform_prior,
    variance_entropy_floor,
    wrapped_gaussian,
)
from .estimator import (
    EstimationReport,
    canonical_epsilon,
    canonical_sample,
    mutual_information,
    scaling_scan,
    simulate,
)
from .numerics import EigenDecomposition, hermitian_eig, shannon_entropy
from .schemes import Component, ResourceAccount, SchemeSpec, preset
from .spectra import (
    SpectralGenerator,
    composite_sum,
    jz,
    jz_pow,
    multipass,
    n_jz,
    number_function,
    roy_a,
    roy_h,
    summarize,
)
from .states import (
    DensityOperator,
    PureState,
    coherent_number_state,
    ghz,
    minmax_superposition,
    mix,
    plus_product,
    tensor,
)

__version__ = "0.1.0"
