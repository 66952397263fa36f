"""Coefficient problems for the class S+ of univalent functions ``f = z/q``.

``q(z) = 1 + sum b_n z^n`` with ``b_n >= 0``; membership in S+ means
``sum (n-1) b_n <= 1`` and in U+(lambda) means that weight is at most ``lambda``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ContractError,
    DomainError,
    GridTooLargeError,
    InvariantError,
    MixedModeError,
    NormalizationError,
    PoleProximityError,
    PreconditionError,
    SingularSeriesError,
    SPlusError,
    UnknownCatalogError,
)
from .series import TruncSeries, derivative, exp_series, log_series, mul, reciprocal  # noqa: E402
from .model import (  # noqa: E402
    CATALOG_IDS,
    BSeq,
    catalog,
    fekete_szego_value,
    g_transform,
    log_coeffs_from_b,
    membership,
    splus_weight,
    starlike_half_sum,
    taylor_from_b,
    ulambda_weight_check,
)
from .bounds import fs_psi, fs_upper, log_coeff_bounds, nu0, solve_nu0, uplus_coeff_intervals  # noqa: E402
from .search import FeasibleRegion, maximize, sample_feasible, verify_bound  # noqa: E402
from .probe import DiscGrid, convexity_probe, f_over_z_re, g_re_prime, starlike_re, u_residual  # noqa: E402
