"""Explicit constants and inequality certificates for the random-vector norms.

Every ``check_*`` function returns a :class:`BoundCertificate` holding the
lower bound, the measured quantity and the upper bound.  A certificate passes
when ``lower <= measured + tol`` and ``measured <= upper + tol``, with ``tol``
three combined standard errors for Monte Carlo quantities and ``1e-10`` (relative
to ``1 + |measured|``) for closed forms.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionSpec, moments
from .errors import DomainError
from .engine import (
    _HERMITIAN_STREAM,
    FrozenNorm,
    NormParams,
    full_norm,
    _abs_moment,
    _check_d,
    full_norm_closed_d2,
    stable_norm_d1,
)
from .matrix import (
    HermitianMatrix,
    as_matrix,
    eigenvalues,
    frobenius_norm,
    identity,
    ones_minus_identity,
    schatten_norm,
)
from .special import gamma
from .streams import parallel_map, substream

__all__ = [
    "BoundCertificate",
    "MZConstants",
    "mz_constants",
    "comparison_coefficient",
    "jensen_comparison_coefficient",
    "upper_coefficient_d_ge2",
    "lower_coefficient_d_le2",
    "check_frobenius_sandwich",
    "check_d2_comparison",
    "check_upper_d_ge2",
    "check_lower_d_le2",
    "gamma_d2",
    "gamma_d",
    "submult_criterion_d2",
    "sharpness_ratio",
    "SearchConfig",
    "estimate_c",
    "check_stable_d1",
    "check_stable_sandwich",
    "certificates_to_csv",
]

CLOSED_FORM_TOL = 1e-10
SIGMAS = 3.0
STABLE_REL_TOL = 0.05
CSV_FIELDS = ("name", "d", "n", "spec", "seed", "lower", "measured", "upper", "pass")


@dataclass(frozen=True)
class BoundCertificate:
    name: str
    lower: float | None
    measured: float
    upper: float | None
    tolerance: float
    context: dict = field(default_factory=dict)

    @property
    def slack_lower(self) -> float | None:
        return None if self.lower is None else self.measured - self.lower

    @property
    def slack_upper(self) -> float | None:
        return None if self.upper is None else self.upper - self.measured

    @property
    def passed(self) -> bool:
        ok_lo = self.lower is None or self.lower <= self.measured + self.tolerance
        ok_hi = self.upper is None or self.measured <= self.upper + self.tolerance
        return bool(ok_lo and ok_hi)

    # the field is named ``pass`` in reports
    @property
    def pass_(self) -> bool:
        return self.passed

    def row(self) -> dict:
        c = self.context
        return {
            "name": self.name,
            "d": c.get("d", ""),
            "n": c.get("n", ""),
            "spec": c.get("spec", ""),
            "seed": c.get("seed", ""),
            "lower": "" if self.lower is None else repr(float(self.lower)),
            "measured": repr(float(self.measured)),
            "upper": "" if self.upper is None else repr(float(self.upper)),
            "pass": "true" if self.passed else "false",
        }


def _tol(measured, *stderrs):
    mc = SIGMAS * math.sqrt(sum(s * s for s in stderrs if s))
    return mc + CLOSED_FORM_TOL * (1.0 + abs(measured))


def _context(spec, d, z, p=None, **extra):
    ctx = {"d": d, "n": as_matrix(z).n, "spec": str(spec)}
    if p is not None:
        ctx.update(seed=p.seed, mc_samples=p.mc_samples, quad_nodes=p.quad_nodes)
    ctx.update(extra)
    return ctx


# --- constants -------------------------------------------------------------


@dataclass(frozen=True)
class MZConstants:
    """Marcinkiewicz-Zygmund constants ``a_d <= 1 <= b_d``."""

    a_d: float
    b_d: float


def mz_constants(d: float) -> MZConstants:
    """``a_d = 2^-d`` and ``b_d = 8^(d/2) Gamma((d+1)/2) / sqrt(pi)``, valid for ``d >= 2``."""
    d = float(d)
    if not d >= 2.0:
        raise DomainError(f"explicit Marcinkiewicz-Zygmund constants need d >= 2, got {d!r}")
    return MZConstants(2.0**-d, 8.0 ** (0.5 * d) * gamma(0.5 * (d + 1.0)) / math.sqrt(math.pi))


def comparison_coefficient(d: float) -> float:
    """``sqrt(pi/2) (2 Gamma((d+1)/2)^2)^(-1/d)``, the stated d-versus-2 factor.

    Stated as a lower bound on ``|||Z|||_d / |||Z|||_2`` for ``d >= 2`` and an
    upper bound for ``1 <= d <= 2``.  Equals 1 at ``d = 2``.
    """
    d = _order(d)
    return math.sqrt(0.5 * math.pi) * (2.0 * gamma(0.5 * (d + 1.0)) ** 2) ** (-1.0 / d)


def jensen_comparison_coefficient(d: float) -> float:
    """``(pi / (2^d Gamma((d+1)/2)^2))^(1/d)``.

    What Lyapunov's inequality followed by Jensen's inequality over
    ``t in [0, 2 pi]`` (normalized measure) actually yields.  It differs from
    :func:`comparison_coefficient` by ``(2 pi)^(1/2 - 1/d)`` and, unlike that
    factor, holds for every entry law: at ``n = 1`` with Gaussian entries
    ``|||Z|||_4 / |||Z|||_2 = 2^(-1/4) = 0.841`` while
    ``comparison_coefficient(4) = 0.914``.
    """
    d = _order(d)
    return (math.pi / (2.0**d * gamma(0.5 * (d + 1.0)) ** 2)) ** (1.0 / d)


def upper_coefficient_d_ge2(spec: DistributionSpec, d: float, mc_budget=1_000_000):
    """``sqrt(2) (pi b_d mu~_d / (2 Gamma((d+1)/2)^2))^(1/d)`` and its standard error."""
    d = float(d)
    if not d >= 2.0:
        raise DomainError(f"the d >= 2 upper bound needs d >= 2, got {d!r}")
    spec.require_variance("the d >= 2 upper bound")
    mom = moments(spec, d, mc_budget)
    b = mz_constants(d).b_d
    g2 = gamma(0.5 * (d + 1.0)) ** 2
    coef = math.sqrt(2.0) * (math.pi * b * mom.mu_tilde / (2.0 * g2)) ** (1.0 / d)
    se = coef * mom.mu_tilde_stderr / (d * mom.mu_tilde)
    return coef, se


def lower_coefficient_d_le2(spec: DistributionSpec, d: float, epsilon: float = 1.0,
                            mc_budget=1_000_000):
    """Coefficient on the ``d``-th powers in the ``1 <= d <= 2`` lower bound:

    ``2^(-d/2-1) pi / ((2^(1+eps) b_{2+eps} mu~_{2+eps})^((2-d)/eps) Gamma((d+1)/2)^2)``.

    Returns ``(coefficient, stderr)``.
    """
    d, eps = float(d), float(epsilon)
    if not 1.0 <= d <= 2.0:
        raise DomainError(f"the 1 <= d <= 2 lower bound needs d in [1, 2], got {d!r}")
    if not eps > 0.0:
        raise DomainError(f"epsilon must be > 0, got {eps!r}")
    spec.require_variance("the 1 <= d <= 2 lower bound")
    spec.require_moment(2.0 + eps)
    mom = moments(spec, 2.0 + eps, mc_budget)
    k = 2.0 ** (1.0 + eps) * mz_constants(2.0 + eps).b_d * mom.mu_tilde
    expo = (2.0 - d) / eps
    coef = 2.0 ** (-0.5 * d - 1.0) * math.pi / (k**expo * gamma(0.5 * (d + 1.0)) ** 2)
    se = coef * expo * mom.mu_tilde_stderr / mom.mu_tilde
    return coef, se


def _order(d):
    d = float(d)
    if not d >= 1.0:
        raise DomainError(f"norm order must satisfy d >= 1, got {d!r}")
    return d


# --- certificates ------------------------------------------------------------


def _measure(z, spec, d, p):
    """``|||Z|||_d`` with its standard error: exact at d = 2, Monte Carlo otherwise."""
    if d == 2.0 and spec.has_variance:
        return full_norm_closed_d2(z, spec).value, 0.0
    est = full_norm(z, spec, NormParams(d, p.mc_samples, p.quad_nodes, p.seed))
    return est.value, est.stderr


def check_frobenius_sandwich(a, spec: DistributionSpec, d: float,
                             p: NormParams = NormParams()) -> BoundCertificate:
    """``a_d E[X^2]^(d/2) ||A||_F^d <= E|<X, lam>|^d <= b_d E|X|^d ||A||_F^d``
    for mean-zero entries and ``d >= 2``."""
    a = a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)
    d = float(d)
    if abs(spec.mean) > 0.0:
        raise DomainError(f"the Frobenius sandwich requires mean-zero entries, got mean {spec.mean!r}")
    spec.require_variance("the Frobenius sandwich")
    mz = mz_constants(d)
    mom = moments(spec, d)
    fro_d = frobenius_norm(a) ** d
    lam = eigenvalues(a).values
    measured, se = _abs_moment(lam, spec, d, p.mc_samples, substream(p.seed, _HERMITIAN_STREAM))
    lower = mz.a_d * spec.variance ** (0.5 * d) * fro_d
    upper = mz.b_d * mom.mu_d * fro_d
    se_upper = mz.b_d * (mom.stderr or 0.0) * fro_d
    return BoundCertificate("frobenius_sandwich", lower, measured, upper,
                            _tol(measured, se, se_upper),
                            _context(spec, d, a, p, a_d=mz.a_d, b_d=mz.b_d))


def check_d2_comparison(z, spec: DistributionSpec, d: float, p: NormParams = NormParams(),
                        coefficient: str = "stated") -> BoundCertificate:
    """Compare ``|||Z|||_d`` with ``c_d |||Z|||_2``.

    ``d >= 2`` gives a lower bound, ``1 <= d <= 2`` an upper bound, and both hold
    with equality at ``d = 2``.  ``coefficient="stated"`` uses
    :func:`comparison_coefficient`; ``"jensen"`` uses
    :func:`jensen_comparison_coefficient`.
    """
    z = as_matrix(z)
    d = _order(d)
    spec.require_variance("the d-versus-2 comparison")
    if coefficient == "stated":
        c, name = comparison_coefficient(d), "d2_comparison"
    elif coefficient == "jensen":
        c, name = jensen_comparison_coefficient(d), "d2_comparison_jensen"
    else:
        raise DomainError(f"coefficient must be 'stated' or 'jensen', got {coefficient!r}")
    n2 = full_norm_closed_d2(z, spec).value
    measured, se = _measure(z, spec, d, p)
    bound = c * n2
    lower, upper = (bound, None) if d > 2.0 else (None, bound)
    if d == 2.0:
        lower = upper = bound
    return BoundCertificate(name, lower, measured, upper, _tol(measured, se),
                            _context(spec, d, z, p, coefficient=c))


def check_upper_d_ge2(z, spec: DistributionSpec, d: float,
                      p: NormParams = NormParams()) -> BoundCertificate:
    """``|||Z|||_d <= sqrt(2) (pi b_d mu~_d / (2 Gamma((d+1)/2)^2))^(1/d) |||Z|||_2``."""
    z = as_matrix(z)
    coef, se_coef = upper_coefficient_d_ge2(spec, d)
    n2 = full_norm_closed_d2(z, spec).value
    measured, se = _measure(z, spec, float(d), p)
    return BoundCertificate("upper_d_ge2", None, measured, coef * n2,
                            _tol(measured, se, se_coef * n2),
                            _context(spec, float(d), z, p, coefficient=coef))


def check_lower_d_le2(z, spec: DistributionSpec, d: float, epsilon: float = 1.0,
                      p: NormParams = NormParams()) -> BoundCertificate:
    """Lower bound on ``|||Z|||_d^d`` by a multiple of ``|||Z|||_2^d`` for ``1 <= d <= 2``.

    The certificate is stated on ``d``-th powers; see :func:`lower_coefficient_d_le2`.
    """
    z = as_matrix(z)
    d = float(d)
    coef, se_coef = lower_coefficient_d_le2(spec, d, epsilon)
    n2 = full_norm_closed_d2(z, spec).value
    value, se = _measure(z, spec, d, p)
    measured = value**d
    se_pow = d * value ** (d - 1.0) * se if value > 0 else 0.0
    return BoundCertificate("lower_d_le2", coef * n2**d, measured, None,
                            _tol(measured, se_pow, se_coef * n2**d),
                            _context(spec, d, z, p, coefficient=coef, epsilon=float(epsilon)))


# --- submultiplicativity scalars -------------------------------------------


def gamma_d2(spec: DistributionSpec) -> float:
    """``sqrt(2 sigma^2 + 2 mu^2) / sigma^2``: the least n-independent factor
    making the d = 2 norm submultiplicative."""
    spec.require_variance("gamma_d2")
    var, mu = spec.variance, spec.mean
    return math.sqrt(2.0 * var + 2.0 * mu * mu) / var


def gamma_d(spec: DistributionSpec, d: float, epsilon: float = 1.0) -> float:
    """Scalar ``gamma_d`` such that ``gamma_d |||.|||_{X,d}`` is submultiplicative,
    as ``C_M / C_m^2`` from the two-sided comparison with the d = 2 norm.

    ``d >= 2``: ``(2 sqrt(2) / pi) (2 pi b_d mu~_d Gamma((d+1)/2)^2)^(1/d)``.
    ``1 <= d < 2``: ``C_M = comparison_coefficient(d)`` and
    ``C_m = lower_coefficient_d_le2(spec, d, epsilon) ** (1/d)``.
    """
    d = _order(d)
    spec.require_variance("gamma_d")
    if d >= 2.0:
        mom = moments(spec, d)
        b = mz_constants(d).b_d
        g2 = gamma(0.5 * (d + 1.0)) ** 2
        return 2.0 * math.sqrt(2.0) / math.pi * (2.0 * math.pi * b * mom.mu_tilde * g2) ** (1.0 / d)
    c_max = comparison_coefficient(d)
    c_min = lower_coefficient_d_le2(spec, d, epsilon)[0] ** (1.0 / d)
    return c_max / (c_min * c_min)


def submult_criterion_d2(spec: DistributionSpec) -> bool:
    """True iff the unscaled d = 2 norm is submultiplicative for every n,
    i.e. ``sigma^2 >= 1 + sqrt(1 + 2 mu^2)``."""
    spec.require_variance("the d = 2 submultiplicativity criterion")
    return spec.variance >= 1.0 + math.sqrt(1.0 + 2.0 * spec.mean**2)


def sharpness_ratio(spec: DistributionSpec, n: int):
    """``gamma |||A_n^2||| / (gamma |||A_n|||)^2`` for ``A_n = J_n - I_n`` at d = 2.

    Returns ``(computed, analytic)``.  ``computed`` goes through the closed-form
    norm with ``A_n^2 = (n - 2) A_n + (n - 1) I``; ``analytic`` is
    ``sqrt(1 - sigma^2 / (sigma^2 + mu^2) * (2n - 3) / (n (n - 1)))``.
    """
    n = int(n)
    if n < 2:
        raise DomainError(f"sharpness ratio needs n >= 2, got {n}")
    g = gamma_d2(spec)
    a = ones_minus_identity(n)
    a2 = HermitianMatrix((n - 2) * a.entries + (n - 1) * identity(n).entries)
    na = full_norm_closed_d2(a, spec).value
    na2 = full_norm_closed_d2(a2, spec).value
    computed = g * na2 / (g * na) ** 2
    var, mu = spec.variance, spec.mean
    analytic = math.sqrt(1.0 - var / (var + mu * mu) * (2.0 * n - 3.0) / (n * (n - 1.0)))
    return computed, analytic


# --- stable entries, d = 1 --------------------------------------------------


def check_stable_d1(a, alpha: float, samples: int = 10_000_000, seed: int = 0,
                    rel_tol: float = STABLE_REL_TOL) -> BoundCertificate:
    """Monte Carlo ``E|<X, lam>|`` against ``(8/pi) ||A||_{S_alpha}`` for
    ``X ~ S(alpha, gamma_alpha)``.

    The variance of ``|<X, lam>|`` is infinite, so a relative band of
    ``rel_tol`` replaces the standard-error tolerance.  ``lower`` and ``upper``
    are the band edges around the closed form.
    """
    a = a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)
    spec = DistributionSpec.stable(alpha)
    exact = stable_norm_d1(a, alpha).value
    lam = eigenvalues(a).values
    _check_d(spec, 1.0)
    measured, se = _abs_moment(lam, spec, 1.0, int(samples), substream(seed, _HERMITIAN_STREAM))
    return BoundCertificate("stable_d1", (1.0 - rel_tol) * exact, measured,
                            (1.0 + rel_tol) * exact, 0.0,
                            {"d": 1.0, "n": a.n, "spec": str(spec), "seed": int(seed),
                             "mc_samples": int(samples), "closed_form": exact,
                             "stderr": se, "rel_gap": abs(measured - exact) / exact if exact else 0.0})


def check_stable_sandwich(z, alpha: float, p: NormParams | None = None,
                          rel_tol: float = STABLE_REL_TOL) -> BoundCertificate:
    """``2 ||Z||_{S_alpha} <= |||Z|||_{X,1} <= 4 ||Z||_{S_alpha}`` with stable entries.

    The middle term is the Monte Carlo :func:`~rvnorm.engine.full_norm`.  The
    tolerance is three standard errors plus ``rel_tol`` of the measured value,
    because heavy tails make the sample standard error unreliable.
    """
    z = as_matrix(z)
    if p is None:
        p = NormParams(d=1.0, mc_samples=20_000, quad_nodes=32)
    spec = DistributionSpec.stable(alpha)
    s = schatten_norm(z, alpha)
    est = full_norm(z, spec, NormParams(1.0, p.mc_samples, p.quad_nodes, p.seed))
    tol = SIGMAS * est.stderr + rel_tol * est.value
    return BoundCertificate("stable_sandwich", 2.0 * s, est.value, 4.0 * s, tol,
                            _context(spec, 1.0, z, est.params, schatten=s, stderr=est.stderr))


# --- c(N) search -------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 4
    iters: int = 200
    step: float = 0.5
    decay: float = 0.985


def _unit(z, norm):
    v = norm(z)
    return z / v if v > 0 else z


def estimate_c(spec: DistributionSpec, d: float, n: int, p: NormParams | None = None,
               search: SearchConfig = SearchConfig()) -> float:
    """Seeded lower-bound estimate of ``c(N) = max N(AB)`` over ``N(A) = N(B) = 1``.

    ``N`` is ``|||.|||_{X,d}`` on ``n x n`` matrices: exact at d = 2, otherwise
    a :class:`~rvnorm.engine.FrozenNorm` so the objective is deterministic.
    Restart 0 starts at ``A = B = J_n - I_n``; the others start at random complex
    pairs.  Each restart hill-climbs with entrywise complex Gaussian moves whose
    size decays geometrically, accepting only improvements.  The result is the
    best ratio found, so it never exceeds the true ``c(N)`` beyond estimator
    noise.
    """
    d = _order(d)
    n = int(n)
    if p is None:
        p = NormParams(d=d, mc_samples=4000, quad_nodes=16)
    elif p.d != d:
        p = NormParams(d, p.mc_samples, p.quad_nodes, p.seed)
    norm = FrozenNorm(spec, n, p)

    def ratio(a, b):
        na, nb = norm(a), norm(b)
        if na == 0.0 or nb == 0.0:
            return 0.0
        return norm(a @ b) / (na * nb)

    def climb(r):
        rng = substream(p.seed, 2, r)
        if r == 0 and n >= 2:
            a = b = ones_minus_identity(n).entries.astype(complex)
        else:
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a, b = _unit(a, norm), _unit(b, norm)
        best = ratio(a, b)
        step = search.step
        for _ in range(search.iters):
            da = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            db = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            s = step / math.sqrt(2.0 * n * n)
            a2 = _unit(a + s * da, norm)
            b2 = _unit(b + s * db, norm)
            val = ratio(a2, b2)
            if val > best:
                a, b, best = a2, b2, val
            step *= search.decay
        return best

    return max(parallel_map(climb, range(search.restarts)))


def certificates_to_csv(certs, header_lines=()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for c in certs:
        w.writerow(c.row())
    return buf.getvalue()
