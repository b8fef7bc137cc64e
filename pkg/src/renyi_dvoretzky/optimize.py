"""Maximum output p-norm estimation by ascent on the unit sphere of C^m.

For a channel given by an isometry ``V`` with range ``W`` inside M_d, the
maximum output p-norm equals the maximum over unit ``c`` of
``||A(c)||_{2p}^2`` where ``A(c) = vec_to_matrix(V c)``. We maximize
``f(c) = ||A(c)||_q`` (``q = 2p``) with multi-restart projected gradient
ascent: step along the tangent gradient, retract by renormalizing, and
backtrack until the Armijo condition holds. A batch of random unit inputs
serves as a baseline.

Every value returned is attained at an explicit input, so maxima are lower
bounds on the true maximum and minima are upper bounds on the true minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .ensembles import Isometry, RngStream
from .errors import DimensionError, InvalidOrderError
from .linalg import SV_CUTOFF, PureState, parse_order, singular_values

__all__ = [
    "AscentConfig",
    "MaxNormEstimate",
    "NormWindow",
    "SubspaceObjective",
    "estimate_max_output_norm",
    "output_p_norm_at",
    "ratio_gradient",
    "subspace_norm_window",
]

# surrogate Schatten order used when minimizing the (nonsmooth) operator norm
SURROGATE_Q = 64.0


@dataclass(frozen=True)
class AscentConfig:
    restarts: int = 20
    max_iters: int = 500
    grad_tol: float = 1e-8
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    init_step: float = 1.0
    sample_baseline: int = 2000

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if not self.grad_tol > 0 or not self.init_step > 0:
            raise ValueError("grad_tol and init_step must be positive")
        if not 0 < self.armijo_c < 1 or not 0 < self.armijo_shrink < 1:
            raise ValueError("armijo_c and armijo_shrink must lie in (0, 1)")
        if self.sample_baseline < 0:
            raise ValueError("sample_baseline must be nonnegative")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _as_isometry(obj) -> Isometry:
    return obj.isometry if hasattr(obj, "isometry") else obj


def _as_stream(rng) -> RngStream:
    return rng if isinstance(rng, RngStream) else RngStream(int(rng))


class SubspaceObjective:
    """``c -> ||vec_to_matrix(V c)||_q`` for a fixed isometry ``V``."""

    def __init__(self, isometry, q):
        w = _as_isometry(isometry)
        self.V = w.matrix
        self.shape = w.out_shape
        self.q = parse_order(q, minimum=2.0)

    @property
    def m(self) -> int:
        return self.V.shape[1]

    def matrix(self, c: np.ndarray) -> np.ndarray:
        return (self.V @ c).reshape(self.shape)

    def __call__(self, c: np.ndarray) -> float:
        return _norm(singular_values(self.matrix(c)), self.q)

    def batch(self, cs: np.ndarray) -> np.ndarray:
        """Values at the rows of ``cs`` (each row normalized first)."""
        cs = cs / np.linalg.norm(cs, axis=1, keepdims=True)
        a = (cs @ self.V.T).reshape((cs.shape[0],) + self.shape)
        return _norm(singular_values(a), self.q)

    def gradient(self, c: np.ndarray, q: Optional[float] = None) -> np.ndarray:
        q = self.q if q is None else q
        if not q > 2:
            raise InvalidOrderError(f"gradient requires q > 2, got {q}")
        if np.isinf(q):
            raise InvalidOrderError("the operator norm objective is not differentiable")
        u, s, vh = np.linalg.svd(self.matrix(c), full_matrices=False)
        s = np.where(s > SV_CUTOFF * s[0], s, 0.0)
        norm = _norm(s, q)
        if norm == 0:
            return np.zeros_like(c)
        # scaled to avoid under/overflow of s**(q-1) for large q
        t = s / s[0]
        g = (u * (t ** (q - 1))) @ vh * (s[0] / norm) ** (q - 1)
        return self.V.conj().T @ g.reshape(-1)

    def top_singular(self, c: np.ndarray):
        u, s, vh = np.linalg.svd(self.matrix(c), full_matrices=False)
        return s[0], u[:, 0], vh[0]


def _norm(s: np.ndarray, q: float):
    if np.isinf(q):
        return s[..., 0]
    smax = s[..., 0]
    safe = np.where(smax > 0, smax, 1.0)
    return np.where(smax > 0, safe * np.sum((s / safe[..., None]) ** q, axis=-1) ** (1 / q), 0.0)


def ratio_gradient(W, c, q) -> np.ndarray:
    """Euclidean gradient of ``c -> ||vec_to_matrix(W c)||_q``.

    ``C^m`` is treated as ``R^{2m}``: the returned complex vector ``g``
    satisfies ``df = Re(vdot(g, dc))``. With ``A = U diag(s) V^dagger`` the
    matrix-space gradient is ``U diag(s^{q-1}) V^dagger / ||A||_q^{q-1}``,
    pulled back through ``W^dagger``.
    """
    q = parse_order(q)
    if not q > 2 or np.isinf(q):
        raise InvalidOrderError(f"gradient needs 2 < q < inf, got {q}")
    c = np.asarray(c, dtype=complex)
    obj = SubspaceObjective(W, q)
    if c.shape != (obj.m,):
        raise DimensionError(f"expected a vector of length {obj.m}")
    return obj.gradient(c)


def _tangent(c: np.ndarray, g: np.ndarray) -> np.ndarray:
    return g - np.real(np.vdot(c, g)) * c


def _canonical_phase(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(c) > 1e-15 * np.abs(c).max())
    if nz.size == 0:
        return c
    z = c[nz[0]]
    out = c * (abs(z) / z)
    out[nz[0]] = abs(z)
    return out


@dataclass
class AscentResult:
    value: float
    point: np.ndarray
    iterations: int
    history: List[float] = field(default_factory=list)


def _gradient_ascent(obj: SubspaceObjective, c0, cfg: AscentConfig, sign: float = 1.0,
                     q: Optional[float] = None) -> AscentResult:
    """Armijo projected gradient ascent of ``sign * ||A(c)||_q`` on the sphere."""
    q = obj.q if q is None else q
    if q == obj.q:
        fun = obj
    else:
        def fun(c):
            return float(_norm(singular_values(obj.matrix(c)), q))

    c = c0 / np.linalg.norm(c0)
    f = sign * fun(c)
    history = [f]
    step = cfg.init_step
    it = 0
    for it in range(1, cfg.max_iters + 1):
        g = _tangent(c, sign * obj.gradient(c, q))
        gn2 = float(np.real(np.vdot(g, g)))
        if np.sqrt(gn2) <= cfg.grad_tol:
            it -= 1
            break
        t = step
        while True:
            cn = c + t * g
            cn /= np.linalg.norm(cn)
            fn = sign * fun(cn)
            if fn >= f + cfg.armijo_c * t * gn2:
                break
            t *= cfg.armijo_shrink
            if t < 1e-18:
                cn = None
                break
        if cn is None:
            break
        c, f = cn, fn
        history.append(f)
        # regrow after backtracking, but never past init_step: longer steps
        # flip the sign of small singular values and stall in a 2-cycle
        step = min(t / cfg.armijo_shrink, cfg.init_step)
    return AscentResult(sign * f, c, it, [sign * h for h in history])


def _power_ascent(obj: SubspaceObjective, c0, cfg: AscentConfig) -> AscentResult:
    """Alternating maximization of the top singular value of ``A(c)``.

    For fixed singular vectors ``(u, v)`` the best ``c`` is the conjugate of
    ``w_i = u^dagger B_i v`` normalized, and ``s_1`` can only grow.
    """
    blocks = obj.V.T.reshape((obj.m,) + obj.shape)
    c = c0 / np.linalg.norm(c0)
    s1, u, vh = obj.top_singular(c)
    history = [float(s1)]
    it = 0
    for it in range(1, cfg.max_iters + 1):
        w = np.einsum("a,iab,b->i", u.conj(), blocks, vh.conj())
        cn = w.conj() / np.linalg.norm(w)
        s_new, u_new, vh_new = obj.top_singular(cn)
        if s_new < s1:
            it -= 1
            break
        gain = s_new - s1
        c, s1, u, vh = cn, s_new, u_new, vh_new
        history.append(float(s1))
        if gain <= cfg.grad_tol * max(s1, 1.0):
            break
    return AscentResult(float(s1), c, it, history)


def _run_ascent(obj, c0, cfg, maximize=True) -> AscentResult:
    if obj.m == 1:
        c = c0 / np.linalg.norm(c0)
        v = obj(c)
        return AscentResult(v, c, 1, [v])
    if np.isinf(obj.q):
        if maximize:
            return _power_ascent(obj, c0, cfg)
        res = _gradient_ascent(obj, c0, cfg, sign=-1.0, q=SURROGATE_Q)
        v = obj(res.point)
        return AscentResult(v, res.point, res.iterations, res.history)
    return _gradient_ascent(obj, c0, cfg, sign=1.0 if maximize else -1.0)


def _random_unit(m: int, g: np.random.Generator, n: Optional[int] = None) -> np.ndarray:
    shape = (m, 2) if n is None else (n, m, 2)
    z = g.standard_normal(shape)
    z = z[..., 0] + 1j * z[..., 1]
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def output_p_norm_at(channel, x, p) -> float:
    """``||Phi(|x><x|)||_p``, computed from the Schmidt coefficients of ``V x``."""
    p = parse_order(p)
    w = _as_isometry(channel)
    x = x.amplitudes if isinstance(x, PureState) else np.asarray(x, dtype=complex)
    if x.shape != (w.m,):
        raise DimensionError(f"input must have dimension {w.m}, got {x.shape}")
    if abs(np.linalg.norm(x) - 1) > 1e-10:
        raise ValueError("input must be a unit vector")
    return SubspaceObjective(w, 2 * p)(x) ** 2


@dataclass
class MaxNormEstimate:
    """Best output p-norm found (a lower bound on the true maximum)."""

    best_value: float
    best_input: PureState
    per_restart_values: np.ndarray
    iterations_used: np.ndarray
    baseline_max: float
    histories: List[List[float]] = field(default_factory=list, repr=False)

    def to_dict(self, include_input: bool = False) -> dict:
        out = {
            "best_value": self.best_value,
            "per_restart_values": [float(v) for v in self.per_restart_values],
            "iterations_used": [int(v) for v in self.iterations_used],
            "baseline_max": self.baseline_max,
            "certification": "estimate",
        }
        if include_input:
            amps = self.best_input.amplitudes
            out["best_input"] = {"re": [float(v) for v in amps.real],
                                 "im": [float(v) for v in amps.imag]}
        return out


def _multistart(obj, cfg, rng: RngStream, maximize: bool, starts=()):
    results = [_run_ascent(obj, np.asarray(s, dtype=complex), cfg, maximize) for s in starts]
    for k in range(cfg.restarts):
        g = rng.child("restart", k).generator
        results.append(_run_ascent(obj, _random_unit(obj.m, g), cfg, maximize))
    base_vals = base_pts = None
    if cfg.sample_baseline:
        g = rng.child("baseline").generator
        base_pts = _random_unit(obj.m, g, cfg.sample_baseline)
        base_vals = obj.batch(base_pts)
    return results, base_pts, base_vals


def estimate_max_output_norm(channel, p, cfg: AscentConfig = AscentConfig(), rng=0,
                             starts: Sequence = ()) -> MaxNormEstimate:
    """Estimate the maximum output p-norm of a partial-trace channel.

    Runs ``cfg.restarts`` ascents from uniformly random inputs (plus any
    explicit ``starts``) on ``||A(c)||_{2p}`` and evaluates
    ``cfg.sample_baseline`` random inputs. The result is a lower bound on the
    true maximum.
    """
    p = parse_order(p)
    if p <= 1:
        raise InvalidOrderError(f"p must be > 1, got {p}")
    obj = SubspaceObjective(_as_isometry(channel), 2 * p)
    results, base_pts, base_vals = _multistart(obj, cfg, _as_stream(rng), True, starts)
    values = np.array([r.value for r in results]) ** 2
    k = int(np.argmax(values))
    best, point = float(values[k]), results[k].point
    baseline_max = -np.inf
    if base_vals is not None:
        j = int(np.argmax(base_vals))
        baseline_max = float(base_vals[j]) ** 2
        if baseline_max > best:
            best, point = baseline_max, base_pts[j]
    point = _canonical_phase(point / np.linalg.norm(point))
    return MaxNormEstimate(
        best_value=best,
        best_input=PureState(point),
        per_restart_values=values,
        iterations_used=np.array([r.iterations for r in results]),
        baseline_max=baseline_max,
        histories=[r.history for r in results],
    )


@dataclass
class NormWindow:
    """Extremes of ``||x||_q / ||x||_2`` found on a subspace."""

    max_ratio: float
    min_ratio: Optional[float]
    argmax: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {"max_ratio": self.max_ratio, "min_ratio": self.min_ratio}


def subspace_norm_window(W, q, cfg: AscentConfig = AscentConfig(), rng=0, *,
                         which: str = "both", starts: Sequence = ()) -> NormWindow:
    """Largest and smallest ratio ``||x||_q/||x||_2`` found on the range of ``W``.

    ``which="max"`` skips the minimization. ``starts`` seeds extra ascents for
    the maximum (used for warm starts on nested subspaces).
    """
    q = parse_order(q, minimum=2.0)
    if q <= 2:
        raise InvalidOrderError(f"q must be > 2, got {q}")
    if which not in ("both", "max"):
        raise ValueError("which must be 'both' or 'max'")
    rng = _as_stream(rng)
    obj = SubspaceObjective(_as_isometry(W), q)
    ups, base_pts, base_vals = _multistart(obj, cfg, rng.child("max"), True, starts)
    k = int(np.argmax([r.value for r in ups]))
    max_ratio, argmax = float(ups[k].value), ups[k].point
    if base_vals is not None and base_vals.max() > max_ratio:
        j = int(np.argmax(base_vals))
        max_ratio, argmax = float(base_vals[j]), base_pts[j]
    min_ratio = None
    if which == "both":
        downs, _, low_vals = _multistart(obj, cfg, rng.child("min"), False)
        min_ratio = float(min(r.value for r in downs))
        if low_vals is not None:
            min_ratio = min(min_ratio, float(low_vals.min()))
    return NormWindow(max_ratio, min_ratio, _canonical_phase(argmax / np.linalg.norm(argmax)))
