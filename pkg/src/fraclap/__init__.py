"""Fractional Laplacian on the n-torus: spectral, kernel and extension methods,
and numerical checks of the transference identity with the operator on R^n."""

__version__ = "0.1.0"

from .errors import (AccuracyError, AliasingError, ConfigurationError, DomainError, ExponentError,
                     FraclapError, SymmetryError, UnsupportedError)
from .spectral_core import (FracOrder, SpectralFunction, TorusFunction, TorusGrid, analyze,
                            check_transference_condition, frac_laplacian_spectral, synthesize)
from .periodize import (BumpPartition, LatticeSumConfig, SchwartzProfile, bump_lift, periodize,
                        poisson_summation_check, repetition_eval)
from .special_fn import bessel_coefficient_identity, bessel_k, c_sigma, gamma
from .kernel_pv import (NonlocalDirichletProblem, PeriodizedKernel, dirichlet_solve, frac_laplacian_pointwise,
                        harnack_ratio_experiment, kernel_eval)
from .extension import ExtensionField, conormal_limit, extend, extension_multiplier
from .transference import TransferenceReport, frac_laplacian_rn_gaussian, lsigma_norm, verify_transference
from .regularity import HoelderNorm, geodesic_distance, hoelder_norm, regularity_ratio_suite
