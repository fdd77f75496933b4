"""Entry distributions: parameter validation, moments and seeded samplers.

Grammar accepted by :func:`parse_spec` (case-insensitive family names)::

    normal:MU,SIGMA      uniform:A,B      rademacher
    exponential:RATE     stable:ALPHA[,SCALE]

``stable:ALPHA`` without a scale uses ``gamma_alpha(ALPHA) = 4 / Gamma((ALPHA-1)/ALPHA)``,
the scale under which the d = 1 norm equals ``(8/pi)`` times the Schatten
``ALPHA``-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, MomentError, ParseError
from .special import gamma
from .streams import substream

__all__ = [
    "Family",
    "DistributionSpec",
    "MomentReport",
    "parse_spec",
    "sample",
    "moments",
    "gamma_alpha",
    "stable_abs_mean",
    "STABLE_SAMPLER_RANGE",
]

STABLE_SAMPLER_RANGE = (1.01, 1.99)
DEFAULT_MC_BUDGET = 1_000_000
_CHUNK = 1 << 20


class Family(str, Enum):
    NORMAL = "normal"
    UNIFORM = "uniform"
    RADEMACHER = "rademacher"
    EXPONENTIAL = "exponential"
    STABLE = "stable"


_ARITY = {
    Family.NORMAL: (2, 2),
    Family.UNIFORM: (2, 2),
    Family.RADEMACHER: (0, 0),
    Family.EXPONENTIAL: (1, 1),
    Family.STABLE: (1, 2),
}


def _fmt(x: float) -> str:
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


@dataclass(frozen=True)
class DistributionSpec:
    """Law of the iid entries ``X_i``.

    Parameters by family: ``normal (mu, sigma)``, ``uniform (a, b)``,
    ``rademacher ()``, ``exponential (rate,)``, ``stable (alpha, scale)``.
    """

    family: Family
    params: tuple = ()

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        params = tuple(float(p) for p in self.params)
        if fam is Family.STABLE and len(params) == 1:
            params = (params[0], gamma_alpha(params[0]))
        lo, hi = _ARITY[fam]
        if fam is Family.STABLE:
            lo = hi = 2
        if not lo <= len(params) <= hi:
            raise DomainError(f"{fam.value} takes {hi} parameter(s), got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise DomainError(f"{fam.value} parameters must be finite, got {params}")
        object.__setattr__(self, "params", params)
        if fam is Family.NORMAL and not params[1] > 0:
            raise DomainError(f"normal requires sigma > 0, got {params[1]!r}")
        if fam is Family.UNIFORM and not params[0] < params[1]:
            raise DomainError(f"uniform requires a < b, got {params}")
        if fam is Family.EXPONENTIAL and not params[0] > 0:
            raise DomainError(f"exponential requires rate > 0, got {params[0]!r}")
        if fam is Family.STABLE:
            alpha, scale = params
            if not 1.0 < alpha < 2.0:
                raise DomainError(f"stable requires alpha in (1, 2), got {alpha!r}")
            if not scale > 0:
                raise DomainError(f"stable requires scale > 0, got {scale!r}")

    # convenience constructors
    @classmethod
    def normal(cls, mu=0.0, sigma=1.0):
        return cls(Family.NORMAL, (mu, sigma))

    @classmethod
    def uniform(cls, a=0.0, b=1.0):
        return cls(Family.UNIFORM, (a, b))

    @classmethod
    def rademacher(cls):
        return cls(Family.RADEMACHER, ())

    @classmethod
    def exponential(cls, rate=1.0):
        return cls(Family.EXPONENTIAL, (rate,))

    @classmethod
    def stable(cls, alpha, scale=None):
        return cls(Family.STABLE, (alpha,) if scale is None else (alpha, scale))

    @property
    def mean(self) -> float:
        f, p = self.family, self.params
        if f is Family.NORMAL:
            return p[0]
        if f is Family.UNIFORM:
            return 0.5 * (p[0] + p[1])
        if f is Family.EXPONENTIAL:
            return 1.0 / p[0]
        return 0.0

    @property
    def variance(self):
        """Variance, or ``None`` when it is infinite (stable laws)."""
        f, p = self.family, self.params
        if f is Family.NORMAL:
            return p[1] ** 2
        if f is Family.UNIFORM:
            return (p[1] - p[0]) ** 2 / 12.0
        if f is Family.RADEMACHER:
            return 1.0
        if f is Family.EXPONENTIAL:
            return 1.0 / p[0] ** 2
        return None

    @property
    def std(self):
        v = self.variance
        return None if v is None else math.sqrt(v)

    @property
    def has_variance(self) -> bool:
        return self.family is not Family.STABLE

    def max_moment(self) -> float:
        """Supremum of the orders ``p`` with ``E|X|^p`` finite (exclusive for stable)."""
        return self.params[0] if self.family is Family.STABLE else math.inf

    def require_moment(self, d: float) -> None:
        if self.family is Family.STABLE and not d < self.params[0]:
            raise MomentError(
                f"stable requires d < alpha for a finite d-th absolute moment "
                f"(got d={_fmt(d)}, alpha={_fmt(self.params[0])})")

    def require_variance(self, what="this quantity") -> None:
        if not self.has_variance:
            raise MomentError(f"{what} needs a finite second moment; stable laws have none")

    def __str__(self):
        if self.family is Family.RADEMACHER:
            return "rademacher"
        return f"{self.family.value}:{','.join(_fmt(p) for p in self.params)}"


def parse_spec(text: str) -> DistributionSpec:
    """Parse ``family[:param,param]`` into a :class:`DistributionSpec`."""
    if isinstance(text, DistributionSpec):
        return text
    raw = str(text).strip()
    name, _, rest = raw.partition(":")
    try:
        fam = Family(name.strip().lower())
    except ValueError:
        raise ParseError(f"unknown distribution family {name!r} in {raw!r}") from None
    try:
        params = tuple(float(x) for x in rest.split(",")) if rest.strip() else ()
    except ValueError:
        raise ParseError(f"distribution parameters must be numbers: {raw!r}") from None
    lo, hi = _ARITY[fam]
    if not lo <= len(params) <= hi:
        raise ParseError(f"{fam.value} takes {lo if lo == hi else f'{lo}-{hi}'} parameter(s), "
                         f"got {len(params)} in {raw!r}")
    return DistributionSpec(fam, params)


def gamma_alpha(alpha: float) -> float:
    """Stable scale ``4 / Gamma((alpha - 1) / alpha)`` for ``alpha`` in (1, 2)."""
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"gamma_alpha requires alpha in (1, 2), got {alpha!r}")
    return 4.0 / gamma((alpha - 1.0) / alpha)


def stable_abs_mean(alpha: float, scale: float) -> float:
    """``E|X|`` for ``X ~ S(alpha, scale)``: ``(2 scale / pi) Gamma((alpha - 1)/alpha)``."""
    return 2.0 * scale / math.pi * gamma((alpha - 1.0) / alpha)


def _stable_standard(alpha: float, rng: np.random.Generator, count: int) -> np.ndarray:
    # Chambers-Mallows-Stuck, beta = 0, unit scale: char. function exp(-|x|^alpha)
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, count)
    w = rng.standard_exponential(count)
    cv = np.cos(v)
    return (np.sin(alpha * v) / cv ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


def sample(spec: DistributionSpec, rng, count: int) -> np.ndarray:
    """Draw ``count`` iid values of ``spec`` from ``rng``.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed (mapped through
    :func:`rvnorm.streams.substream`).  Stable samples equal ``scale`` times a
    unit-scale draw, so scaling is exact value by value.
    """
    if not isinstance(rng, np.random.Generator):
        rng = substream(int(rng))
    count = int(count)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    f, p = spec.family, spec.params
    if f is Family.NORMAL:
        return p[0] + p[1] * rng.standard_normal(count)
    if f is Family.UNIFORM:
        return rng.uniform(p[0], p[1], count)
    if f is Family.RADEMACHER:
        return (2 * rng.integers(0, 2, count, dtype=np.int8) - 1).astype(float)
    if f is Family.EXPONENTIAL:
        return rng.standard_exponential(count) / p[0]
    alpha, scale = p
    lo, hi = STABLE_SAMPLER_RANGE
    if not lo <= alpha <= hi:
        raise DomainError(f"stable sampler supports alpha in [{lo}, {hi}], got {alpha!r}")
    return scale * _stable_standard(alpha, rng, count)


@dataclass(frozen=True)
class MomentReport:
    """Mean, standard deviation and ``d``-th absolute central moment.

    ``sigma`` and ``mu_tilde`` are ``None`` for laws without a variance.
    ``method`` is ``"analytic"`` or ``"monte_carlo"``; Monte Carlo reports carry
    the sample count and the standard error of ``mu_d``.
    """

    d: float
    mean: float
    sigma: float | None
    mu_d: float
    mu_tilde: float | None
    method: str
    samples: int | None = None
    stderr: float | None = None

    @property
    def mu_tilde_stderr(self) -> float:
        if self.stderr is None or self.sigma is None:
            return 0.0
        return self.stderr / self.sigma**self.d


def _analytic_mu_d(spec: DistributionSpec, d: float):
    f, p = spec.family, spec.params
    if f is Family.NORMAL:
        return p[1] ** d * 2.0 ** (0.5 * d) * gamma(0.5 * (d + 1.0)) / math.sqrt(math.pi)
    if f is Family.UNIFORM:
        h = 0.5 * (p[1] - p[0])
        return h**d / (d + 1.0)
    if f is Family.RADEMACHER:
        return 1.0
    return None


def moments(spec: DistributionSpec, d: float, mc_budget: int = DEFAULT_MC_BUDGET, rng=None):
    """Moments of ``spec`` needed by the norm bounds, at order ``d >= 1``.

    Closed forms are used for normal, uniform and Rademacher entries.  Other
    families fall back to Monte Carlo on ``mc_budget`` draws from ``rng``
    (default stream: seed 0), centred at the exact mean.
    """
    d = float(d)
    if not d >= 1.0:
        raise DomainError(f"moment order must be >= 1, got {d!r}")
    spec.require_moment(d)
    mu = spec.mean
    sigma = spec.std
    exact = _analytic_mu_d(spec, d)
    if exact is not None:
        tilde = exact / sigma**d
        return MomentReport(d, mu, sigma, exact, tilde, "analytic")
    if rng is None:
        rng = substream(0, 0x4D4F4D)
    elif not isinstance(rng, np.random.Generator):
        rng = substream(int(rng), 0x4D4F4D)
    n = int(mc_budget)
    if n < 2:
        raise DomainError(f"mc_budget must be >= 2, got {n}")
    total = 0.0
    total_sq = 0.0
    left = n
    while left:
        m = min(left, _CHUNK)
        y = np.abs(sample(spec, rng, m) - mu) ** d
        total += float(y.sum())
        total_sq += float(np.dot(y, y))
        left -= m
    mu_d = total / n
    var = max(total_sq / n - mu_d * mu_d, 0.0) * n / (n - 1)
    se = math.sqrt(var / n)
    tilde = None if sigma is None else mu_d / sigma**d
    return MomentReport(d, mu, sigma, mu_d, tilde, "monte_carlo", n, se)
