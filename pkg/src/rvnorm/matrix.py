"""Dense complex matrices, Hermitian eigenvalues and the classical norms.

Eigenvalues come from a cyclic complex Jacobi iteration.  It is written to act
on a stack of matrices at once, so a whole quadrature grid of rotated matrices
is diagonalized in a single call.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, ParseError

__all__ = [
    "ComplexMatrix",
    "HermitianMatrix",
    "Spectrum",
    "as_matrix",
    "eigenvalues",
    "eigenvalues_batch",
    "singular_values",
    "frobenius_norm",
    "schatten_norm",
    "rotate",
    "rotate_batch",
    "matmul",
    "adjoint",
    "trace",
    "identity",
    "random_hermitian",
    "random_complex",
    "ones_minus_identity",
    "load_matrix",
    "dump_matrix",
]

HERMITIAN_TOL = 1e-12
JACOBI_MAX_SWEEPS = 50
JACOBI_REL_TOL = 1e-12


class ComplexMatrix:
    """Square complex matrix with finite entries.

    The entry array is copied on construction and marked read-only, so instances
    behave as immutable values.
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.complex128)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix entries must be finite")
        a.setflags(write=False)
        self._a = a

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    def adjoint(self) -> "ComplexMatrix":
        return ComplexMatrix(self._a.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self._a))

    def is_hermitian(self, tol=HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self._a - self._a.conj().T)) <= tol)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a
        return self._a.astype(dtype)

    def __matmul__(self, other):
        return matmul(self, other)

    def __add__(self, other):
        return ComplexMatrix(self._a + as_matrix(other).entries)

    def __sub__(self, other):
        return ComplexMatrix(self._a - as_matrix(other).entries)

    def __neg__(self):
        return ComplexMatrix(-self._a)

    def __mul__(self, c):
        return ComplexMatrix(complex(c) * self._a)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({self._a.tolist()!r})"


class HermitianMatrix(ComplexMatrix):
    """Self-adjoint matrix, stored exactly symmetrized as ``(A + A*) / 2``.

    Inputs whose asymmetry exceeds ``1e-12`` (absolute, entrywise) are rejected.
    """

    __slots__ = ()

    def __init__(self, entries):
        a = np.array(entries.entries if isinstance(entries, ComplexMatrix) else entries,
                     dtype=np.complex128)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim == 2 and a.shape[0] == a.shape[1] and a.size:
            asym = np.max(np.abs(a - a.conj().T))
            if not asym <= HERMITIAN_TOL:
                raise DomainError(f"matrix is not Hermitian (max |A - A*| = {asym:.3e})")
            a = 0.5 * (a + a.conj().T)
        super().__init__(a)


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues sorted in descending order, with multiplicity."""

    values: np.ndarray

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values.tolist())


def as_matrix(z) -> ComplexMatrix:
    if isinstance(z, ComplexMatrix):
        return z
    return ComplexMatrix(z)


def _as_hermitian(a) -> HermitianMatrix:
    if isinstance(a, HermitianMatrix):
        return a
    return HermitianMatrix(a)


def identity(n: int) -> HermitianMatrix:
    return HermitianMatrix(np.eye(n))


def matmul(a, b) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: {a.n}x{a.n} times {b.n}x{b.n}")
    return ComplexMatrix(a.entries @ b.entries)


def adjoint(z) -> ComplexMatrix:
    return as_matrix(z).adjoint()


def trace(z) -> complex:
    return as_matrix(z).trace()


def frobenius_norm(z) -> float:
    a = np.asarray(as_matrix(z).entries)
    return float(math.sqrt(np.sum(a.real**2 + a.imag**2)))


def rotate(z, t: float) -> HermitianMatrix:
    """Return ``e^{it} Z + e^{-it} Z*``.

    Computed as ``W + W*`` with ``W = e^{it} Z``, which is Hermitian bit for bit.
    """
    w = np.exp(1j * float(t)) * as_matrix(z).entries
    return HermitianMatrix(w + w.conj().T)


def rotate_batch(z, ts) -> np.ndarray:
    """Stack of ``rotate(Z, t)`` arrays, shape ``(len(ts), n, n)``."""
    ts = np.asarray(ts, dtype=float)
    w = np.exp(1j * ts)[:, None, None] * as_matrix(z).entries[None, :, :]
    return w + np.conj(np.swapaxes(w, -1, -2))


def _jacobi_stack(a: np.ndarray) -> np.ndarray:
    """Diagonalize a stack of Hermitian matrices in place; return the diagonals."""
    k, n, _ = a.shape
    if n == 1:
        return a[:, :1, 0].real.copy()
    fro = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    target = JACOBI_REL_TOL * fro
    offmask = ~np.eye(n, dtype=bool)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    idx = np.arange(k)
    for sweep in range(JACOBI_MAX_SWEEPS + 1):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        active = off > target
        if not active.any():
            return np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
        if sweep == JACOBI_MAX_SWEEPS:
            break
        sub = idx[active]
        b = a[sub]
        # threshold strategy: skip small pivots during the first sweeps
        if sweep < 3:
            thresh = 0.2 * off[active] / (n * n)
        else:
            thresh = np.zeros(len(sub))
        for p, q in pairs:
            apq = b[:, p, q]
            r = np.abs(apq)
            rot = r > np.maximum(thresh, 1e-300)
            if not rot.any():
                continue
            app = b[:, p, p].real
            aqq = b[:, q, q].real
            phase = np.where(rot, apq / np.where(rot, r, 1.0), 1.0)
            safe_r = np.where(rot, r, 1.0)
            zeta = (aqq - app) / (2.0 * safe_r)
            t = np.sign(zeta) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            t = np.where(zeta == 0.0, 1.0, t)
            t = np.where(rot, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # (p, q) block of the unitary G with (G* B G)_pq = 0:
            # [[c, s ph], [-s conj(ph), c]], ph = apq / |apq|
            g_pp = c
            g_pq = s * phase
            g_qp = -s * np.conj(phase)
            g_qq = c
            # columns <- B @ G
            colp = b[:, :, p].copy()
            colq = b[:, :, q]
            b[:, :, p] = colp * g_pp[:, None] + colq * g_qp[:, None]
            b[:, :, q] = colp * g_pq[:, None] + colq * g_qq[:, None]
            # rows <- G* @ B
            rowp = b[:, p, :].copy()
            rowq = b[:, q, :]
            b[:, p, :] = rowp * np.conj(g_pp)[:, None] + rowq * np.conj(g_qp)[:, None]
            b[:, q, :] = rowp * np.conj(g_pq)[:, None] + rowq * np.conj(g_qq)[:, None]
            b[:, p, q] = np.where(rot, 0.0, b[:, p, q])
            b[:, q, p] = np.where(rot, 0.0, b[:, q, p])
            b[:, p, p] = b[:, p, p].real
            b[:, q, q] = b[:, q, q].real
        a[sub] = b
    raise ConvergenceError(
        f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps")


def eigenvalues_batch(stack) -> np.ndarray:
    """Eigenvalues of a stack of Hermitian arrays, each row sorted descending.

    The arrays are symmetrized first; callers are responsible for passing
    matrices that are Hermitian up to roundoff.
    """
    a = np.array(stack, dtype=np.complex128)
    if a.ndim == 2:
        a = a[None]
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    vals = _jacobi_stack(a)
    return -np.sort(-vals, axis=1)


def eigenvalues(a) -> Spectrum:
    """All eigenvalues of a Hermitian matrix, sorted descending."""
    h = _as_hermitian(a)
    vals = eigenvalues_batch(h.entries[None])[0]
    vals.setflags(write=False)
    return Spectrum(vals)


def singular_values(z) -> np.ndarray:
    """Singular values of ``Z`` (descending), from the Hermitian dilation
    ``[[0, Z], [Z*, 0]]`` whose spectrum is ``+/- sigma_j``."""
    z = as_matrix(z).entries
    n = z.shape[0]
    dil = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    dil[:n, n:] = z
    dil[n:, :n] = z.conj().T
    vals = eigenvalues_batch(dil[None])[0]
    return np.maximum(vals[:n], 0.0)


def schatten_norm(a, alpha: float) -> float:
    """Schatten ``alpha``-norm ``(sum_j |lambda_j|^alpha)^(1/alpha)``.

    Hermitian input uses eigenvalue moduli; any other square matrix uses its
    singular values.  Only ``alpha > 1`` is supported.
    """
    alpha = float(alpha)
    if not alpha > 1.0:
        raise DomainError(f"Schatten norm requires alpha > 1, got {alpha!r}")
    m = as_matrix(a)
    if isinstance(m, HermitianMatrix) or m.is_hermitian():
        s = np.abs(eigenvalues(m).values)
    else:
        s = singular_values(m)
    return _schatten_from_values(s, alpha)


def _schatten_from_values(s, alpha: float) -> float:
    s = np.abs(np.asarray(s, dtype=float))
    top = float(np.max(s)) if s.size else 0.0
    if top == 0.0:
        return 0.0
    return top * float(np.sum((s / top) ** alpha)) ** (1.0 / alpha)


def _rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    from .streams import substream

    return substream(0 if rng is None else int(rng), 0x4D41545)


def random_complex(n: int, rng=None) -> ComplexMatrix:
    """Matrix with iid standard normal real and imaginary parts.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    g = _rng(rng)
    return ComplexMatrix(g.standard_normal((n, n)) + 1j * g.standard_normal((n, n)))


def random_hermitian(n: int, rng=None) -> HermitianMatrix:
    """Symmetrized complex Gaussian matrix ``(G + G*) / 2``."""
    g = random_complex(n, rng).entries
    return HermitianMatrix(0.5 * (g + g.conj().T))


def ones_minus_identity(n: int) -> HermitianMatrix:
    """``J_n - I_n``: zeros on the diagonal, ones elsewhere."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return HermitianMatrix(np.ones((n, n)) - np.eye(n))


def load_matrix(path) -> ComplexMatrix:
    """Read ``{"n": int, "re": [[...]], "im": [[...]]}``; ``im`` is optional.

    Returns a :class:`HermitianMatrix` when the data is Hermitian within
    tolerance, otherwise a plain :class:`ComplexMatrix`.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read matrix file {path}: {exc}") from exc
    return matrix_from_json(obj)


def matrix_from_json(obj) -> ComplexMatrix:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ParseError('matrix JSON must be an object with at least an "re" field')
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float) if obj.get("im") is not None else np.zeros_like(re)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries must be numbers: {exc}") from exc
    if re.ndim != 2 or re.shape != im.shape or re.shape[0] != re.shape[1]:
        raise ParseError(f"re/im must be matching square arrays, got {re.shape} and {im.shape}")
    if "n" in obj and obj["n"] != re.shape[0]:
        raise ParseError(f'"n" = {obj["n"]} does not match the {re.shape[0]}x{re.shape[0]} data')
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise ParseError("matrix entries must be finite")
    m = ComplexMatrix(re + 1j * im)
    if m.is_hermitian():
        return HermitianMatrix(m)
    return m


def matrix_to_json(z) -> dict:
    a = as_matrix(z).entries
    out = {"n": int(a.shape[0]), "re": a.real.tolist()}
    if np.any(a.imag != 0.0):
        out["im"] = a.imag.tolist()
    return out


def dump_matrix(z, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(z), fh)
