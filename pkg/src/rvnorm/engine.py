"""Random-vector norms on Hermitian and general square matrices.

On Hermitian ``A`` with eigenvalues ``lam`` the norm is

    ||A||_{X,d} = (E|<X, lam>|^d / Gamma(d + 1))^(1/d),

estimated by Monte Carlo.  Any square ``Z`` is handled through the Hermitian
family ``H(t) = e^{it} Z + e^{-it} Z*``:

    |||Z|||_{X,d}^d = (1 / (2 pi C(d, d/2))) * integral_0^{2 pi} ||H(t)||_{X,d}^d dt.

``||H(t + pi)|| = ||H(t)||``, so the integral is twice a trapezoid sum over
``[0, pi)``.  Each node gets its own random substream ``(seed, 1, node)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .distributions import (
    STABLE_SAMPLER_RANGE,
    DistributionSpec,
    Family,
    gamma_alpha,
    sample,
    stable_abs_mean,
)
from .errors import DomainError
from .matrix import (
    HermitianMatrix,
    _schatten_from_values,
    as_matrix,
    eigenvalues,
    eigenvalues_batch,
    frobenius_norm,
    rotate_batch,
    schatten_norm,
)
from .special import central_binomial, gamma
from .streams import parallel_map, substream

__all__ = [
    "Method",
    "NormParams",
    "NormEstimate",
    "hermitian_norm",
    "full_norm",
    "full_norm_closed_d2",
    "stable_norm_d1",
    "stable_full_norm_d1",
    "FrozenNorm",
]

DEFAULT_MC_SAMPLES = 200_000
DEFAULT_QUAD_NODES = 64
_ROW_CHUNK = 1 << 18
_HERMITIAN_STREAM = 0
_NODE_STREAM = 1


class Method(str, Enum):
    MONTE_CARLO = "monte_carlo"
    CLOSED_FORM_D2 = "closed_form_d2"
    CLOSED_FORM_STABLE_D1 = "closed_form_stable_d1"


@dataclass(frozen=True)
class NormParams:
    """Order ``d`` and Monte Carlo / quadrature budget.

    ``quad_nodes=None`` selects 64 nodes, or 128 when ``d < 2`` where the
    integrand is less smooth.
    """

    d: float = 2.0
    mc_samples: int = DEFAULT_MC_SAMPLES
    quad_nodes: int | None = None
    seed: int = 0

    def __post_init__(self):
        d = float(self.d)
        if not d >= 1.0:
            raise DomainError(f"norm order must satisfy d >= 1, got {d!r}")
        object.__setattr__(self, "d", d)
        if int(self.mc_samples) < 2:
            raise DomainError(f"mc_samples must be >= 2, got {self.mc_samples}")
        object.__setattr__(self, "mc_samples", int(self.mc_samples))
        if self.quad_nodes is None:
            object.__setattr__(self, "quad_nodes",
                               2 * DEFAULT_QUAD_NODES if d < 2.0 else DEFAULT_QUAD_NODES)
        nodes = int(self.quad_nodes)
        if nodes < 8 or nodes % 2:
            raise DomainError(f"quad_nodes must be an even integer >= 8, got {self.quad_nodes}")
        object.__setattr__(self, "quad_nodes", nodes)
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class NormEstimate:
    value: float
    stderr: float
    params: NormParams
    method: Method

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "method": self.method.value,
            "d": self.params.d,
            "mc_samples": self.params.mc_samples,
            "quad_nodes": self.params.quad_nodes,
            "seed": self.params.seed,
        }


def _check_d(spec: DistributionSpec, d: float) -> None:
    spec.require_moment(d)
    if spec.family is Family.STABLE:
        lo, hi = STABLE_SAMPLER_RANGE
        if not lo <= spec.params[0] <= hi:
            raise DomainError(f"stable sampler supports alpha in [{lo}, {hi}], "
                              f"got {spec.params[0]!r}")


def _draw_chunks(spec, rng, samples, n):
    """Yield ``samples`` random vectors of length ``n`` as row blocks.

    The block layout depends only on ``(samples, n)``, never on threading.
    """
    rows = max(1, _ROW_CHUNK // n)
    left = samples
    while left:
        m = min(left, rows)
        yield sample(spec, rng, m * n).reshape(m, n)
        left -= m


def _abs_moment(lam, spec, d, samples, rng):
    """Mean of ``|<X, lam>|^d`` over ``samples`` draws and its standard error."""
    lam = np.asarray(lam, dtype=float)
    if not np.any(lam):
        return 0.0, 0.0
    total = 0.0
    total_sq = 0.0
    for x in _draw_chunks(spec, rng, samples, lam.shape[0]):
        y = np.abs(x @ lam)
        y = y * y if d == 2.0 else y**d
        total += float(y.sum())
        total_sq += float(np.dot(y, y))
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(var / samples)


def _root(mean_over_gamma, se_over_gamma, d):
    # value = m^(1/d); delta method: se(value) = se(m) * value / (d m)
    if mean_over_gamma <= 0.0:
        return 0.0, 0.0
    value = mean_over_gamma ** (1.0 / d)
    return value, se_over_gamma * value / (d * mean_over_gamma)


def hermitian_norm(a, spec: DistributionSpec, p: NormParams = NormParams()) -> NormEstimate:
    """Monte Carlo estimate of ``||A||_{X,d}`` for Hermitian ``A``.

    Uses eigenvalues sorted descending, so unitary conjugates of ``A`` see the
    same samples.  Draws come from stream ``(seed, 0)``.
    """
    a = a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)
    _check_d(spec, p.d)
    lam = eigenvalues(a).values
    rng = substream(p.seed, _HERMITIAN_STREAM)
    m, se = _abs_moment(lam, spec, p.d, p.mc_samples, rng)
    g = gamma(p.d + 1.0)
    value, err = _root(m / g, se / g, p.d)
    return NormEstimate(value, err, p, Method.MONTE_CARLO)


def _nodes(k: int) -> np.ndarray:
    return np.arange(k) * (math.pi / k)


def _combine_nodes(means, ses, d):
    # |||Z|||^d = sum_k E_k / (K C(d,d/2) Gamma(d+1))
    k = len(means)
    scale = k * central_binomial(d) * gamma(d + 1.0)
    s = math.fsum(means)
    se = math.sqrt(math.fsum(x * x for x in ses))
    return _root(s / scale, se / scale, d)


def full_norm(z, spec: DistributionSpec, p: NormParams = NormParams()) -> NormEstimate:
    """Monte Carlo plus trapezoid estimate of ``|||Z|||_{X,d}`` for square ``Z``.

    Total work is ``quad_nodes * mc_samples`` draws of the random vector; node
    ``k`` at ``t = k pi / quad_nodes`` uses substream ``(seed, 1, k)``.
    """
    z = as_matrix(z)
    _check_d(spec, p.d)
    k = p.quad_nodes
    lams = eigenvalues_batch(rotate_batch(z, _nodes(k)))

    def node(i):
        return _abs_moment(lams[i], spec, p.d, p.mc_samples,
                           substream(p.seed, _NODE_STREAM, i))

    results = parallel_map(node, range(k))
    value, err = _combine_nodes([r[0] for r in results], [r[1] for r in results], p.d)
    return NormEstimate(value, err, p, Method.MONTE_CARLO)


def full_norm_closed_d2(z, spec: DistributionSpec) -> NormEstimate:
    """Exact d = 2 norm: ``sqrt(sigma^2 ||Z||_F^2 / 2 + mu^2 |tr Z|^2 / 2)``."""
    z = as_matrix(z)
    spec.require_variance("the closed-form d = 2 norm")
    mu, var = spec.mean, spec.variance
    fro = frobenius_norm(z)
    tr = abs(z.trace())
    value = math.sqrt(0.5 * var * fro * fro + 0.5 * mu * mu * tr * tr)
    return NormEstimate(value, 0.0, NormParams(d=2.0), Method.CLOSED_FORM_D2)


def _require_stable_alpha(alpha):
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise DomainError(f"stable closed form requires alpha in (1, 2), got {alpha!r}")
    return alpha


def stable_norm_d1(a, alpha: float, scale: float | None = None) -> NormEstimate:
    """``||A||_{X,1}`` for symmetric stable entries, without sampling.

    ``<X, lam>`` is again symmetric stable with scale ``scale * ||A||_{S_alpha}``,
    so the norm is ``E|<X, lam>| = (2 scale / pi) Gamma((alpha-1)/alpha) ||A||_{S_alpha}``.
    With the default ``scale = gamma_alpha(alpha)`` this is ``(8/pi) ||A||_{S_alpha}``.
    """
    alpha = _require_stable_alpha(alpha)
    a = a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)
    if scale is None:
        value = 8.0 / math.pi * schatten_norm(a, alpha)
    else:
        value = stable_abs_mean(alpha, float(scale)) * schatten_norm(a, alpha)
    return NormEstimate(value, 0.0, NormParams(d=1.0), Method.CLOSED_FORM_STABLE_D1)


def stable_full_norm_d1(z, alpha: float, scale: float | None = None,
                        quad_nodes: int = 256) -> NormEstimate:
    """``|||Z|||_{X,1}`` for stable entries by trapezoid over the closed form.

    Deterministic companion of :func:`full_norm` for the stable d = 1 case;
    for ``scale = gamma_alpha`` it is ``(1/pi) int_0^{2pi} ||e^{it}Z + e^{-it}Z*||_{S_alpha} dt``.
    """
    alpha = _require_stable_alpha(alpha)
    scale = gamma_alpha(alpha) if scale is None else float(scale)
    lams = eigenvalues_batch(rotate_batch(z, _nodes(quad_nodes)))
    per_node = [_schatten_from_values(l, alpha) for l in lams]
    # (1 / (2 pi C)) * (2 pi / K) * sum_k E|Y_k|
    mean_abs = stable_abs_mean(alpha, scale) * math.fsum(per_node) / quad_nodes
    value = mean_abs / central_binomial(1.0)
    p = NormParams(d=1.0, quad_nodes=quad_nodes)
    return NormEstimate(value, 0.0, p, Method.CLOSED_FORM_STABLE_D1)


class FrozenNorm:
    """``|||.|||_{X,d}`` with the Monte Carlo samples drawn once and reused.

    Every call on a matrix of size ``n`` evaluates the same estimator with the
    same random vectors (common random numbers), which makes the estimate a
    deterministic, continuous function of the matrix.  The samples are those
    :func:`full_norm` would draw, so both agree up to summation roundoff.
    """

    def __init__(self, spec: DistributionSpec, n: int, p: NormParams):
        _check_d(spec, p.d)
        self.spec, self.n, self.params = spec, int(n), p
        self._closed = p.d == 2.0 and spec.has_variance
        if not self._closed:
            self._x = [np.concatenate(list(_draw_chunks(
                spec, substream(p.seed, _NODE_STREAM, i), p.mc_samples, self.n)))
                for i in range(p.quad_nodes)]
            self._ts = _nodes(p.quad_nodes)
            self._scale = p.quad_nodes * central_binomial(p.d) * gamma(p.d + 1.0)

    def __call__(self, z) -> float:
        if self._closed:
            return full_norm_closed_d2(z, self.spec).value
        lams = eigenvalues_batch(rotate_batch(z, self._ts))
        d = self.params.d
        total = math.fsum(float(np.mean(np.abs(x @ lam) ** d)) for x, lam in zip(self._x, lams))
        return (total / self._scale) ** (1.0 / d) if total > 0 else 0.0


def with_seed(p: NormParams, seed: int) -> NormParams:
    return replace(p, seed=int(seed))
