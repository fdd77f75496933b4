"""Random-vector norms on complex matrices.

``||A||_{X,d} = (E|<X, lam(A)>|^d / Gamma(d+1))^(1/d)`` on Hermitian ``A`` with
iid entries ``X_i``, its extension ``|||Z|||_{X,d}`` to all square matrices,
and numerical certificates for the inequalities relating them.
"""

__version__ = "0.1.0"

from .distributions import DistributionSpec, Family, moments, parse_spec, sample
from .engine import (
    FrozenNorm,
    NormEstimate,
    NormParams,
    full_norm,
    full_norm_closed_d2,
    hermitian_norm,
    stable_full_norm_d1,
    stable_norm_d1,
)
from .errors import ConvergenceError, DomainError, MomentError, ParseError, RVNormError
from .matrix import (
    ComplexMatrix,
    HermitianMatrix,
    eigenvalues,
    frobenius_norm,
    load_matrix,
    random_complex,
    random_hermitian,
    schatten_norm,
    singular_values,
)
from .special import central_binomial, cos_power_mean, gamma

__all__ = [
    "__version__",
    "DistributionSpec", "Family", "moments", "parse_spec", "sample",
    "FrozenNorm", "NormEstimate", "NormParams", "full_norm", "full_norm_closed_d2",
    "hermitian_norm", "stable_full_norm_d1", "stable_norm_d1",
    "ConvergenceError", "DomainError", "MomentError", "ParseError", "RVNormError",
    "ComplexMatrix", "HermitianMatrix", "eigenvalues", "frobenius_norm", "load_matrix",
    "random_complex", "random_hermitian", "schatten_norm", "singular_values",
    "central_binomial", "cos_power_mean", "gamma",
]
