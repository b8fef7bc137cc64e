"""Monte Carlo checks of Schatten-norm concentration on random subspaces of M_d.

``M`` is the mean of ``||X||_q`` over the Hilbert-Schmidt sphere, ``b = 1``
bounds ``||.||_q`` by ``||.||_2``. On a random m-dimensional subspace with
m up to about ``(M/b)^2 d^2`` the ratio ``||x||_q / ||x||_2`` stays within a
constant factor of ``M``; for larger m its maximum still shrinks like
``sqrt(m / d^2)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .ensembles import RngStream, hs_sphere_point, random_subspace_basis
from .errors import DimensionError, InvalidOrderError
from .linalg import parse_order, singular_values
from .optimize import AscentConfig, subspace_norm_window

__all__ = [
    "DvoretzkyWindow",
    "NormStats",
    "ShrinkPoint",
    "dvoretzky_dimension",
    "estimate_M",
    "shrinking_experiment",
    "window_experiment",
]

DEFAULT_EPSILON = 0.5
DEFAULT_SAMPLES = 500
DEFAULT_TRIALS = 20


def _stream(rng) -> RngStream:
    return rng if isinstance(rng, RngStream) else RngStream(int(rng))


def _map(fn, items, threads: int):
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(fn, items))


def sandwich(d: int, q: float) -> tuple:
    """Range ``[d^{1/q - 1/2}, 1]`` of ``||x||_q / ||x||_2`` on M_d."""
    return d ** (1.0 / q - 0.5), 1.0


@dataclass(frozen=True)
class NormStats:
    q: float
    d: int
    samples: int
    M_hat: float
    M_stderr: float
    opnorm_mean_hat: float
    opnorm_stderr: float
    b: float = 1.0

    @property
    def holder_bound(self) -> float:
        """``(E||X||_inf)^{1 - 2/q}``, the Holder upper bound on M."""
        return self.opnorm_mean_hat ** (1 - 2 / self.q)

    @property
    def holder_stderr(self) -> float:
        # delta method for x -> x^(1 - 2/q)
        e = 1 - 2 / self.q
        return e * self.opnorm_mean_hat ** (e - 1) * self.opnorm_stderr if e else 0.0

    def check(self) -> None:
        """Raise ``AssertionError`` if the estimates break the Holder chain."""
        lower = self.d ** (1 / self.q - 0.5)
        assert lower <= self.M_hat + 3 * self.M_stderr + 1e-12, "M below the sandwich floor"
        assert self.M_hat <= 1 + 1e-12, "M above b = 1"
        assert self.M_hat <= self.holder_bound + 3 * (self.holder_stderr + self.M_stderr) + 1e-12, \
            "M above the Holder bound"

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["holder_bound"] = self.holder_bound
        out["holder_stderr"] = self.holder_stderr
        out["M_sqrt_d_if_opnorm"] = self.opnorm_mean_hat * np.sqrt(self.d)
        return out


def estimate_M(d: int, q, samples: int = DEFAULT_SAMPLES, rng=0, threads: int = 1) -> NormStats:
    """Sample mean (and standard error) of ``||X||_q`` on the HS sphere of M_d.

    The operator norm of the same samples is recorded too, for the Holder
    chain ``M <= (E||X||_inf)^{1 - 2/q}``. Sample ``i`` uses substream ``i``.
    """
    q = parse_order(q)
    if q < 2:
        raise InvalidOrderError(f"q must be >= 2, got {q}")
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = _stream(rng)

    def one(i):
        s = singular_values(hs_sphere_point(d, rng.child("sample", i)))
        if q == 2:
            return 1.0, s[0]
        if np.isinf(q):
            return s[0], s[0]
        return float(np.sum(s**q) ** (1 / q)), s[0]

    vals = np.array(_map(one, range(samples), threads))
    qn, op = vals[:, 0], vals[:, 1]
    return NormStats(
        q=q,
        d=d,
        samples=samples,
        M_hat=float(np.mean(qn)),
        M_stderr=float(np.std(qn, ddof=1) / np.sqrt(samples)),
        opnorm_mean_hat=float(np.mean(op)),
        opnorm_stderr=float(np.std(op, ddof=1) / np.sqrt(samples)),
    )


def dvoretzky_dimension(d: int, q, stats: Optional[NormStats] = None,
                        epsilon: float = DEFAULT_EPSILON, c_eff: float = 1.0,
                        M_hat: Optional[float] = None) -> int:
    """``round(c_eff * eps^2 * (M/b)^2 * d^2)``, the subspace dimension up to
    which the norm is predicted to be almost proportional to ``||.||_2``."""
    if M_hat is None:
        if stats is None:
            raise ValueError("need stats or M_hat")
        if stats.d != d or stats.q != parse_order(q):
            raise ValueError("stats were computed for a different (d, q)")
        M_hat, b = stats.M_hat, stats.b
    else:
        b = 1.0
    return int(round(c_eff * epsilon**2 * (M_hat / b) ** 2 * d * d))


@dataclass
class DvoretzkyWindow:
    d: int
    q: float
    m: int
    trials: int
    M_hat: float
    M_stderr: float
    per_trial: List[dict]
    epsilon_effective: float

    def rows(self) -> List[dict]:
        return [dict(d=self.d, q=self.q, m=self.m, trial=t, **r) for t, r in enumerate(self.per_trial)]

    @property
    def ratio_spread(self) -> float:
        return max(r["max_ratio"] / r["min_ratio"] for r in self.per_trial)

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["max_over_min"] = self.ratio_spread
        out["sandwich"] = list(sandwich(self.d, self.q))
        return out


def window_experiment(d: int, q, m: int, trials: int = DEFAULT_TRIALS,
                      cfg: AscentConfig = AscentConfig(), rng=0, *,
                      stats: Optional[NormStats] = None, threads: int = 1) -> DvoretzkyWindow:
    """Largest and smallest ``||x||_q / ||x||_2`` on ``trials`` random subspaces.

    ``epsilon_effective`` is the worst relative deviation of either extreme
    from ``M_hat`` over all trials.
    """
    q = parse_order(q, minimum=2.0)
    if not 1 <= m <= d * d:
        raise DimensionError(f"need 1 <= m <= d^2 = {d * d}, got {m}")
    rng = _stream(rng)
    if stats is None:
        stats = estimate_M(d, q, DEFAULT_SAMPLES, rng.child("M"), threads)

    def one(t):
        sub = rng.child("trial", t)
        w = random_subspace_basis(m, d, sub.child("basis"))
        res = subspace_norm_window(w, q, cfg, sub.child("ascent"))
        return res.to_dict()

    per_trial = _map(one, range(trials), threads)
    eps = max(max(r["max_ratio"] / stats.M_hat - 1, 1 - r["min_ratio"] / stats.M_hat)
              for r in per_trial)
    return DvoretzkyWindow(d, q, m, trials, stats.M_hat, stats.M_stderr, per_trial, float(eps))


@dataclass
class ShrinkPoint:
    m: int
    worst_max_ratio: float
    empirical_C: float
    per_trial: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def shrinking_experiment(d: int, q, m_list: Sequence[int], trials: int = DEFAULT_TRIALS,
                         cfg: AscentConfig = AscentConfig(), rng=0, *,
                         nested: bool = True, threads: int = 1) -> List[ShrinkPoint]:
    """Worst ``max ||x||_q / ||x||_2`` over random m-dimensional subspaces, per m.

    The empirical constant is ``worst_max_ratio / (sqrt(m / d^2) * b)``. With
    ``nested=True`` each trial draws one Haar basis of the largest size and
    uses its leading columns for every m (leading columns of a Haar isometry
    are Haar), warm-starting each m from the previous maximizer, so the
    per-trial maxima are nondecreasing in m.
    """
    q = parse_order(q, minimum=2.0)
    ms = sorted(int(m) for m in m_list)
    if not ms or ms[0] < 1 or ms[-1] > d * d:
        raise DimensionError(f"every m must lie in [1, {d * d}]")
    rng = _stream(rng)

    def one(t):
        sub = rng.child("trial", t)
        out = []
        if nested:
            full = random_subspace_basis(ms[-1], d, sub.child("basis"))
        prev = None
        for m in ms:
            if nested:
                w = full.truncate(m)
                starts = [] if prev is None else [np.concatenate([prev, np.zeros(m - prev.size)])]
            else:
                w = random_subspace_basis(m, d, sub.child("basis", m))
                starts = []
            res = subspace_norm_window(w, q, cfg, sub.child("ascent", m), which="max", starts=starts)
            prev = res.argmax
            out.append(res.max_ratio)
        return out

    table = np.array(_map(one, range(trials), threads))  # trials x len(ms)
    points = []
    for j, m in enumerate(ms):
        worst = float(table[:, j].max())
        points.append(ShrinkPoint(m, worst, worst / np.sqrt(m / (d * d)), [float(v) for v in table[:, j]]))
    return points
