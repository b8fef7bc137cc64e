"""Dense complex linear algebra on matrices and bipartite vectors.

Index convention: a vector on C^d (x) C^r is stored as a flat array of length
``d * r`` and flat index ``k`` corresponds to the pair ``(k // r, k % r)``.
Reshaping a vector to a ``d x r`` matrix is therefore a plain row-major
``reshape`` and Kronecker products use the same ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DimensionError, InvalidOrderError, ShapeError, SymmetryError

__all__ = [
    "SV_CUTOFF",
    "DensityMatrix",
    "PureState",
    "as_matrix",
    "hermitian_eigenvalues",
    "is_density_matrix",
    "parse_order",
    "partial_trace_2",
    "schatten_norm",
    "schmidt_coefficients",
    "singular_values",
    "tensor_product",
    "vec_to_matrix",
]

# relative threshold below which singular values count as exact zeros
SV_CUTOFF = 1e-14

Order = Union[float, int, str]


def parse_order(p: Order, minimum: float = 1.0) -> float:
    """Return ``p`` as a float, accepting ``"inf"`` for the operator norm.

    Raises:
        InvalidOrderError: if ``p`` is NaN, not a number, or below ``minimum``.
    """
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "+inf", "∞"):
            return np.inf
        try:
            p = float(s)
        except ValueError:
            raise InvalidOrderError(f"cannot parse order {p!r}") from None
    p = float(p)
    if np.isnan(p) or p < minimum:
        raise InvalidOrderError(f"order must be >= {minimum}, got {p}")
    return p


def as_matrix(a) -> np.ndarray:
    """Unwrap a ``DensityMatrix`` (or anything array-like) to an ndarray."""
    if isinstance(a, DensityMatrix):
        return a.matrix
    return np.asarray(a)


def singular_values(a: np.ndarray) -> np.ndarray:
    """Nonincreasing singular values with relative round-off zeroed out.

    Works on stacks of matrices (any leading batch dimensions).
    """
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    if s.size == 0:
        return s
    smax = s[..., :1]
    return np.where(s > SV_CUTOFF * smax, s, 0.0)


def _lp(s: np.ndarray, p: float) -> np.ndarray:
    # l_p norm along the last axis, scaled by the max entry to avoid overflow
    if np.isinf(p):
        return s[..., 0] if s.shape[-1] else np.zeros(s.shape[:-1])
    smax = s[..., 0]
    safe = np.where(smax > 0, smax, 1.0)
    t = s / safe[..., None]
    return np.where(smax > 0, safe * np.sum(t**p, axis=-1) ** (1.0 / p), 0.0)


def schatten_norm(a, p: Order):
    """Schatten p-norm: the l_p norm of the singular values of ``a``.

    ``p`` may be ``np.inf`` (or the string ``"inf"``) for the operator norm.
    A stack of matrices gives an array of norms.
    """
    p = parse_order(p)
    a = as_matrix(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    out = _lp(singular_values(a), p)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PureState:
    """A unit vector, optionally tagged as living on C^d (x) C^r."""

    amplitudes: np.ndarray
    bipartite_shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm {np.linalg.norm(amps)!r})")
        if self.bipartite_shape is not None:
            d, r = (int(v) for v in self.bipartite_shape)
            if d * r != amps.size:
                raise ShapeError(f"bipartite shape {(d, r)} does not match dim {amps.size}")
            object.__setattr__(self, "bipartite_shape", (d, r))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, v, bipartite_shape=None) -> "PureState":
        v = np.asarray(v, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v), bipartite_shape)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def _split(x, shape):
    if isinstance(x, PureState):
        shape = shape or x.bipartite_shape
        x = x.amplitudes
    if shape is None:
        raise ShapeError("a bipartite shape (d, r) is required")
    x = np.asarray(x)
    d, r = shape
    if x.shape[-1] != d * r:
        raise ShapeError(f"vector of length {x.shape[-1]} cannot be reshaped to {d}x{r}")
    return x, int(d), int(r)


def vec_to_matrix(x, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Identify a vector on C^d (x) C^r with a ``d x r`` matrix.

    ``u (x) v`` is sent to ``outer(u, v)`` (no conjugation); entry ``(i, j)``
    of the result is amplitude ``i*r + j``. Batched input ``(..., d*r)`` is
    reshaped to ``(..., d, r)``.
    """
    x, d, r = _split(x, shape)
    return x.reshape(x.shape[:-1] + (d, r))


def schmidt_coefficients(x, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Schmidt coefficients of a bipartite vector, nonincreasing."""
    return singular_values(vec_to_matrix(x, shape))


def partial_trace_2(rho, d: int, r: int) -> np.ndarray:
    """Trace out the second factor of an operator on C^d (x) C^r."""
    rho = as_matrix(rho)
    if rho.shape != (d * r, d * r):
        raise ShapeError(f"expected a {d * r}x{d * r} matrix, got {rho.shape}")
    return np.einsum("ijkj->ik", rho.reshape(d, r, d, r))


def hermitian_eigenvalues(a, tol: float = 1e-8) -> np.ndarray:
    """Real spectrum of a Hermitian matrix, sorted nonincreasing.

    Raises:
        SymmetryError: if ``a`` deviates from its adjoint by more than
            ``tol`` times its Hilbert-Schmidt norm (entrywise).
    """
    a = as_matrix(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.linalg.norm(a), 1.0)
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol * scale:
        raise SymmetryError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(a)[::-1]


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product, consistent with the row-major vector convention."""
    return np.kron(as_matrix(a), as_matrix(b))


def is_density_matrix(a, tol: float = 1e-10) -> bool:
    a = as_matrix(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(np.linalg.norm(a), 1.0)
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        return False
    if abs(np.trace(a) - 1.0) > tol:
        return False
    return bool(np.linalg.eigvalsh((a + a.conj().T) / 2)[0] >= -tol * scale)


class DensityMatrix:
    """Hermitian, positive semi-definite, trace-one matrix.

    Construction checks the invariants with absolute tolerance ``1e-10``
    scaled by the Hilbert-Schmidt norm. Eigenvalues in ``[-1e-10, 0)`` are
    clipped to zero and the trace renormalized; anything worse raises.
    """

    __slots__ = ("matrix",)
    TOL = 1e-10

    def __init__(self, matrix):
        a = np.array(as_matrix(matrix), dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"density matrix must be square, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("density matrix has non-finite entries")
        scale = max(np.linalg.norm(a), 1.0)
        if np.max(np.abs(a - a.conj().T)) > self.TOL * scale:
            raise SymmetryError("density matrix is not Hermitian")
        a = (a + a.conj().T) / 2
        tr = np.trace(a).real
        if abs(tr - 1.0) > self.TOL:
            raise ValueError(f"density matrix has trace {tr!r}")
        evals, evecs = np.linalg.eigh(a)
        if evals[0] < -self.TOL * scale:
            raise ValueError(f"density matrix has negative eigenvalue {evals[0]!r}")
        if evals[0] < 0:
            evals = np.clip(evals, 0.0, None)
            a = (evecs * evals) @ evecs.conj().T
            a /= np.trace(a).real
        self.matrix = a
        self.matrix.flags.writeable = False

    @classmethod
    def from_pure(cls, x) -> "DensityMatrix":
        if isinstance(x, PureState):
            x = x.amplitudes
        x = np.asarray(x, dtype=complex)
        return cls(np.outer(x, x.conj()))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d) / d)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigenvalues(self.matrix)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def check_dims(m: int, n: int, what: str = "m") -> None:
    if m < 1 or m > n:
        raise DimensionError(f"{what} must be in [1, {n}], got {m}")
