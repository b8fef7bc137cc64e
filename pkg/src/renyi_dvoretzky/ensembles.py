"""Seeded sampling of Gaussian matrices, Haar isometries and random subspaces.

Randomness flows through :class:`RngStream`, a ``(master_seed, stream_id)``
pair. Experiments derive one stream per trial with :meth:`RngStream.child`,
so every trial's samples are fixed by the master seed alone, independent of
the order (or thread) in which trials run.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Literal, Optional, Tuple

import numpy as np

from .errors import DimensionError, ShapeError
from .io import matrix_from_dict, matrix_to_dict
from .linalg import vec_to_matrix

__all__ = [
    "Isometry",
    "RngStream",
    "complex_gaussian_matrix",
    "haar_isometry",
    "hs_sphere_point",
    "random_subspace_basis",
    "stream_id",
]

Field = Literal["complex", "real"]
_MASK64 = (1 << 64) - 1


def stream_id(*parts) -> int:
    """Stable 64-bit id from a tuple of labels (e.g. experiment name, trial)."""
    text = "\x1f".join(repr(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(master_seed, stream_id)``.

    Each call to :attr:`generator` returns a *fresh* generator positioned at
    the start of the stream, so hold on to the returned object when drawing
    several samples.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    @property
    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, *parts) -> "RngStream":
        """Substream keyed by ``parts`` under this stream."""
        return RngStream(self.master_seed, stream_id(self.stream_id, *parts))


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def complex_gaussian_matrix(rows: int, cols: int, rng) -> np.ndarray:
    """i.i.d. standard complex Gaussians: E|z|^2 = 1, re/im variance 1/2."""
    if rows < 1 or cols < 1:
        raise DimensionError("rows and cols must be positive")
    g = _gen(rng)
    z = g.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def _haar_columns(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    # Haar requires a positive diagonal of the triangular factor
    phase = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return q * phase[None, :]


@dataclass(frozen=True, eq=False)
class Isometry:
    """An isometry C^m -> C^d (x) C^r stored as a ``(d*r) x m`` matrix."""

    matrix: np.ndarray
    out_shape: Tuple[int, int]
    field_tag: Field = "complex"
    seed: Optional[int] = None
    stream: Optional[int] = None
    tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        v = np.array(self.matrix, dtype=complex)
        d, r = (int(x) for x in self.out_shape)
        object.__setattr__(self, "out_shape", (d, r))
        if v.ndim != 2 or v.shape[0] != d * r:
            raise ShapeError(f"isometry matrix must have {d * r} rows, got {v.shape}")
        if v.shape[1] > d * r:
            raise DimensionError(f"m = {v.shape[1]} exceeds d*r = {d * r}")
        if self.field_tag not in ("complex", "real"):
            raise ValueError(f"unknown field {self.field_tag!r}")
        if self.field_tag == "real" and np.any(v.imag != 0):
            raise ValueError("real isometry has nonzero imaginary parts")
        gram = v.conj().T @ v
        if np.max(np.abs(gram - np.eye(v.shape[1]))) > self.tol:
            raise ValueError("columns are not orthonormal within tolerance")
        v.flags.writeable = False
        object.__setattr__(self, "matrix", v)

    @property
    def m(self) -> int:
        return self.matrix.shape[1]

    @property
    def d(self) -> int:
        return self.out_shape[0]

    @property
    def r(self) -> int:
        return self.out_shape[1]

    def basis_matrices(self) -> np.ndarray:
        """The columns reshaped to ``d x r`` matrices, shape ``(m, d, r)``."""
        return vec_to_matrix(self.matrix.T, self.out_shape)

    def truncate(self, m: int) -> "Isometry":
        """The isometry restricted to the first ``m`` input coordinates."""
        return Isometry(self.matrix[:, :m], self.out_shape, self.field_tag,
                        self.seed, self.stream)

    def conjugate(self) -> "Isometry":
        return Isometry(self.matrix.conj(), self.out_shape, self.field_tag,
                        self.seed, self.stream)

    def to_dict(self) -> dict:
        out = matrix_to_dict(self.matrix)
        out.update(m=self.m, d=self.d, r=self.r, field=self.field_tag,
                   seed=self.seed, stream=self.stream)
        return out

    @classmethod
    def from_dict(cls, obj) -> "Isometry":
        v = matrix_from_dict(obj)
        try:
            m, d, r = int(obj["m"]), int(obj["d"]), int(obj.get("r", obj["d"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed isometry object: {exc}") from None
        if v.shape != (d * r, m):
            raise ShapeError(f"matrix shape {v.shape} inconsistent with m={m}, d={d}, r={r}")
        return cls(v, (d, r), obj.get("field", "complex"), obj.get("seed"), obj.get("stream"))

    @classmethod
    def identity(cls, d: int, r: Optional[int] = None) -> "Isometry":
        r = d if r is None else r
        return cls(np.eye(d * r), (d, r), "real")


def haar_isometry(m: int, d: int, r: int, field: Field = "complex", rng=0) -> Isometry:
    """Haar-distributed isometry C^m -> C^d (x) C^r (or its real analogue).

    QR of a Gaussian matrix with the triangular factor's diagonal made
    positive; the real variant uses real Gaussians and is orthogonal.
    """
    n = d * r
    if m < 1 or m > n:
        raise DimensionError(f"need 1 <= m <= d*r = {n}, got m = {m}")
    g = _gen(rng)
    if field == "real":
        z = g.standard_normal((n, m))
        q, t = np.linalg.qr(z)
        q = q * np.where(np.diagonal(t) < 0, -1.0, 1.0)[None, :]
        v = q.astype(complex)
    elif field == "complex":
        v = _haar_columns(complex_gaussian_matrix(n, m, g))
    else:
        raise ValueError(f"unknown field {field!r}")
    seed = rng.master_seed if isinstance(rng, RngStream) else None
    stream = rng.stream_id if isinstance(rng, RngStream) else None
    return Isometry(v, (d, r), field, seed, stream)


def random_subspace_basis(m: int, d: int, rng=0, field: Field = "complex") -> Isometry:
    """Orthonormal basis of a Haar-random m-dimensional subspace of M_d."""
    if m < 1 or m > d * d:
        raise DimensionError(f"need 1 <= m <= d^2 = {d * d}, got m = {m}")
    return haar_isometry(m, d, d, field, rng)


def hs_sphere_point(d: int, rng) -> np.ndarray:
    """A uniform point on the Hilbert-Schmidt unit sphere of M_d."""
    if d < 1:
        raise DimensionError("d must be positive")
    g = complex_gaussian_matrix(d, d, rng)
    return g / np.linalg.norm(g)
