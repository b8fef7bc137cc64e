"""Renyi and von Neumann entropies (natural logarithm)."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, InvalidOrderError
from .linalg import hermitian_eigenvalues, parse_order

__all__ = ["EIG_CUTOFF", "entropy_from_p_norm", "renyi_entropy", "to_bits"]

EIG_CUTOFF = 1e-14


def renyi_entropy(rho, p=1.0) -> float:
    """Renyi entropy ``log(tr rho^p) / (1 - p)``; von Neumann entropy at p = 1.

    ``p = inf`` gives the min-entropy ``-log lambda_max``. Eigenvalues below
    ``EIG_CUTOFF`` are dropped, which implements ``0 log 0 = 0``.
    """
    p = parse_order(p)
    lam = np.clip(hermitian_eigenvalues(rho), 0.0, None)
    lam = lam[lam > EIG_CUTOFF]
    if p == 1:
        s = -float(np.sum(lam * np.log(lam)))
    elif np.isinf(p):
        s = -float(np.log(lam[0]))
    else:
        s = float(np.log(np.sum(lam**p)) / (1.0 - p))
    return max(s, 0.0)


def entropy_from_p_norm(norm_p: float, p) -> float:
    """Renyi entropy of a state from its Schatten p-norm, ``p/(1-p) log norm``.

    Raises:
        InvalidOrderError: for ``p <= 1``.
        DomainError: for ``norm_p <= 0``.
    """
    p = parse_order(p)
    if p <= 1:
        raise InvalidOrderError(f"p must be > 1, got {p}")
    if not norm_p > 0:
        raise DomainError(f"norm must be positive, got {norm_p}")
    if np.isinf(p):
        return -float(np.log(norm_p))
    return p / (1.0 - p) * float(np.log(norm_p))


def to_bits(nats: float) -> float:
    return nats / np.log(2.0)
