"""Numerical laboratory for monotone heat-flow functionals.

Densities sampled on uniform 1-D grids evolve under exact Gaussian-kernel
heat flow; convolution chains of their powers drive a family of functionals
that are monotone in time and converge to closed-form sharp limits (Young
and reverse Young, Brascamp-Lieb chains, Babenko, Prekopa-Leindler, and the
entropy power inequality).  The verification suites check monotonicity,
Gaussian equality cases, and limit convergence at desk scale.
"""

from .convolution import (
    SpectralFunction,
    convolve,
    convolve_n,
    fourier_transform,
    heat_chain,
    power,
    restrict,
    sup_convolution_pair,
    sup_convolve_n,
)
from .functionals import (
    ExponentSystem,
    FunctionalTrace,
    Regime,
    dual_exponent,
    entropy_functional,
    entropy_functional_limit,
    entropy_moment_functional,
    entropy_moment_limit,
    epi_gap,
    lieb_bound,
    lieb_bound_maximizer,
    lieb_bound_maximum,
    norm_functional,
    norm_functional_limit,
    sharp_constant,
    sup_functional,
    sup_functional_limit,
    supconv_functional,
    supconv_functional_limit,
)
from .grid import (
    DensityStats,
    Grid,
    GridFunction,
    dilate,
    entropy_power,
    fisher_information,
    gaussian,
    lp_norm,
    make_grid,
    mass,
    second_moment,
    shannon_entropy,
    stats,
)
from .heat import (
    DomainOverflowError,
    HeatInput,
    TimeGrid,
    evolve,
    evolve_at,
    power_pde_residual,
    selfsimilar_rescale,
)
from .verification import (
    TOLERANCES,
    TestDensitySpec,
    VerificationReport,
    babenko_suite,
    blachman_suite,
    concavity_suite,
    epi_suite,
    gaussian_closure_suite,
    limit_report,
    monotonicity_report,
    trace,
    young_suite,
)

__version__ = "0.1.0"
