"""ilwhodge: exact-arithmetic engine for the ILW hierarchy and one-point
linear Hodge-integral identities.

Everything is computed over the rationals at a configurable truncation
order: Bernoulli-number constants, truncated multivariate power series,
differential polynomials and local functionals, the hierarchy Hamiltonians
and flows, the one-point intersection-number tables, and the extraction of
the constants C_g = |B_{2g}|/(2 (2g)!), with coefficient-by-coefficient
verification reports.
"""

from .exactnum import Rational, bernoulli, c_g, dispersion_coeff
from .mpseries import (
    MultiSeries,
    SeriesError,
    VarSpec,
    divide_by_var,
    exp_series,
    inverse_series,
    log_series,
    log_sinc_half,
    pow_linear_exponent,
    sinc_half_series,
    substitute_square,
)
from .diffalg import (
    DiffAlgError,
    DiffMonomial,
    DiffPoly,
    LocalFunctional,
    NotSelfAdjointError,
    NotTotalDerivativeError,
    coeff_ring,
    integrate_x,
    miura_forward,
    miura_inverse,
    miura_inverse_series,
    miura_series,
    normalize,
    poisson_bracket,
    reconstruct_functional_from_flow,
    total_x_derivative,
    u_key,
    variational_derivative,
)
from .hodge import (
    BracketTable,
    HodgeConsistencyError,
    dimension_check,
    extract_cg,
    one_point_table,
    s_series,
    s_tilde_series,
    verify_cg,
    verify_linear_term_identity,
    verify_one_point_reverse,
)
from .ilw import (
    Hamiltonian,
    InconsistentSystemError,
    UnderdeterminedSystemError,
    flow,
    h1,
    hamiltonian,
    higher_hamiltonian,
    verify_commutation,
    verify_flow_t1,
    verify_flow_t2,
)
from .reports import VerificationReport

__version__ = "0.1.0"
