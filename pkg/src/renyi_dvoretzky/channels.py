"""Quantum channels of partial-trace form, rho -> tr_2(V rho V^dagger)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .ensembles import Isometry
from .entropy import renyi_entropy
from .errors import DimensionError, InvalidOrderError, UnsupportedShapeError
from .linalg import DensityMatrix, PureState, as_matrix, hermitian_eigenvalues, parse_order, partial_trace_2, schatten_norm

__all__ = [
    "KrausSet",
    "PartialTraceChannel",
    "ProductBounds",
    "apply",
    "certified_product_lower_bounds",
    "conjugate_channel",
    "kraus_from_isometry",
    "maximally_entangled_state",
    "product_channel_on_max_entangled",
]


@dataclass(frozen=True, eq=False)
class PartialTraceChannel:
    """The channel M_m -> M_d obtained by tracing out C^r after an isometry."""

    isometry: Isometry

    @property
    def m(self) -> int:
        return self.isometry.m

    @property
    def d(self) -> int:
        return self.isometry.d

    @property
    def r(self) -> int:
        return self.isometry.r

    @property
    def V(self) -> np.ndarray:
        return self.isometry.matrix

    def __call__(self, rho):
        return apply(self, rho)


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: List[np.ndarray]

    def completeness_defect(self) -> float:
        m = self.operators[0].shape[1]
        acc = sum(k.conj().T @ k for k in self.operators)
        return float(np.linalg.norm(acc - np.eye(m)))

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        return sum(k @ rho @ k.conj().T for k in self.operators)


def _channel(ch) -> PartialTraceChannel:
    return ch if isinstance(ch, PartialTraceChannel) else PartialTraceChannel(ch)


def apply(channel, rho) -> DensityMatrix:
    """Output state ``tr_2(V rho V^dagger)``."""
    ch = _channel(channel)
    rho = as_matrix(rho)
    if rho.shape != (ch.m, ch.m):
        raise DimensionError(f"channel input dimension is {ch.m}, got {rho.shape}")
    out = partial_trace_2(ch.V @ rho @ ch.V.conj().T, ch.d, ch.r)
    return DensityMatrix(out)


def kraus_from_isometry(channel) -> KrausSet:
    """Kraus operators ``K_j = (I_d (x) <j|) V``, one per environment index."""
    ch = _channel(channel)
    blocks = ch.V.reshape(ch.d, ch.r, ch.m)
    return KrausSet([blocks[:, j, :].copy() for j in range(ch.r)])


def conjugate_channel(channel) -> PartialTraceChannel:
    """The channel defined by the entrywise conjugate isometry."""
    return PartialTraceChannel(_channel(channel).isometry.conjugate())


def maximally_entangled_state(m: int) -> PureState:
    """``(1/sqrt(m)) sum_i e_i (x) e_i`` on C^m (x) C^m."""
    if m < 1:
        raise DimensionError("m must be positive")
    amps = np.zeros(m * m, dtype=complex)
    amps[:: m + 1] = 1.0 / np.sqrt(m)
    return PureState(amps, (m, m))


def _product_output(ch: PartialTraceChannel) -> np.ndarray:
    # Column (b, e) of `x` is (K_b (x) conj(K_e)) psi_m, so x x^dagger is the
    # Kraus sum over all r^2 product operators.
    blocks = ch.isometry.basis_matrices()  # (m, d, r)
    x = np.einsum("iab,ice->acbe", blocks, blocks.conj(), optimize=True)
    x = x.reshape(ch.d * ch.d, ch.r * ch.r) / np.sqrt(ch.m)
    return x @ x.conj().T


def product_channel_on_max_entangled(channel) -> DensityMatrix:
    """``(Phi (x) conj(Phi))(|psi_m><psi_m|)`` as a ``d^2 x d^2`` state.

    Only the square case ``r == d`` is supported.
    """
    ch = _channel(channel)
    if ch.r != ch.d:
        raise UnsupportedShapeError(f"product channel needs r == d, got (d, r) = {(ch.d, ch.r)}")
    return DensityMatrix(_product_output(ch))


@dataclass(frozen=True)
class ProductBounds:
    """Exact quantities for the product channel at the maximally entangled input.

    ``p_norm_lb`` lower-bounds the maximum output p-norm of the product
    channel and ``entropy_ub`` upper-bounds its minimal output entropy,
    both witnessed by the maximally entangled input.
    """

    lambda_max: float
    bound_m_over_d2: float
    p_norm_lb: float
    entropy_ub: float
    overlap: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def certified_product_lower_bounds(channel, p) -> ProductBounds:
    p = parse_order(p)
    if p <= 1:
        raise InvalidOrderError(f"p must be > 1, got {p}")
    ch = _channel(channel)
    out = product_channel_on_max_entangled(ch)
    evals = hermitian_eigenvalues(out)
    psi_d = maximally_entangled_state(ch.d).amplitudes
    overlap = float(np.real(psi_d.conj() @ out.matrix @ psi_d))
    return ProductBounds(
        lambda_max=float(evals[0]),
        bound_m_over_d2=ch.m / ch.d**2,
        p_norm_lb=schatten_norm(out, p),
        entropy_ub=renyi_entropy(out, p),
        overlap=overlap,
    )
