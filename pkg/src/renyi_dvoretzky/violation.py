"""Random-channel multiplicativity experiment.

A Haar channel ``Phi`` with ``m ~ d^{1+1/p}`` is paired with its conjugate.
The product channel's output on the maximally entangled state is computed
exactly and certifies a lower bound on its maximum output p-norm; the single
channel's maximum output p-norm is an optimizer estimate. The report
compares the two with each quantity labeled ``certified`` or ``estimate``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import List, Literal, Optional, Sequence, Union

import numpy as np

from .channels import PartialTraceChannel, certified_product_lower_bounds, conjugate_channel
from .ensembles import RngStream, haar_isometry
from .entropy import entropy_from_p_norm, to_bits
from .errors import DimensionError, InvalidOrderError
from .io import SCHEMA_VERSION, float_or_inf
from .linalg import parse_order
from .optimize import AscentConfig, estimate_max_output_norm

__all__ = [
    "ScanGrid",
    "ViolationReport",
    "critical_m",
    "run_scan",
    "run_violation",
    "summarize",
]


def critical_m(d: int, p) -> int:
    """``round(d^{1 + 1/p})`` clamped to ``[1, d^2]``."""
    p = parse_order(p)
    if p <= 1:
        raise InvalidOrderError(f"p must be > 1, got {p}")
    exponent = 1.0 if np.isinf(p) else 1.0 + 1.0 / p
    return int(min(max(round(d**exponent), 1), d * d))


@dataclass
class ViolationReport:
    p: float
    d: int
    m: int
    seed: int
    field_tag: str
    single_norm_estimate: float
    single_norm_detail: dict
    single_entropy_estimate: float
    product_lambda_max: float
    product_p_norm_lb: float
    product_entropy_ub: float
    product_overlap: float
    certified_entropy_cap: float
    multiplicativity_gap: float
    additivity_gap: float
    violation_detected: bool
    trial: int = 0
    config: dict = field(default_factory=dict)

    CERTIFICATION = {
        "single_norm_estimate": "estimate",
        "single_entropy_estimate": "estimate",
        "product_lambda_max": "certified",
        "product_p_norm_lb": "certified",
        "product_entropy_ub": "certified",
        "certified_entropy_cap": "certified",
        "multiplicativity_gap": "estimate",
        "additivity_gap": "estimate",
    }

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items()}
        out["schema"] = SCHEMA_VERSION
        out["certification"] = dict(self.CERTIFICATION)
        out["bits"] = {
            "single_entropy_estimate": to_bits(self.single_entropy_estimate),
            "product_entropy_ub": to_bits(self.product_entropy_ub),
            "additivity_gap": to_bits(self.additivity_gap),
        }
        return out

    def summary_line(self) -> str:
        flag = "VIOLATION" if self.violation_detected else "no violation"
        return (f"p={self.p:g} d={self.d} m={self.m} trial={self.trial} field={self.field_tag}: "
                f"single~{self.single_norm_estimate:.6g} product>={self.product_p_norm_lb:.6g} "
                f"mult_gap={self.multiplicativity_gap:.6g} add_gap={self.additivity_gap:.6g} [{flag}]")


def _check_real_conjugate(channel: PartialTraceChannel) -> None:
    conj = conjugate_channel(channel)
    if not np.array_equal(conj.V, channel.V):
        raise AssertionError("real channel differs from its conjugate")


def run_violation(p, d: int, m: Optional[int] = None, field: str = "complex", seed: int = 0,
                  cfg: AscentConfig = AscentConfig(), *, trial: int = 0,
                  isometry=None) -> ViolationReport:
    """Sample a channel and report single- and product-channel quantities.

    ``m`` defaults to :func:`critical_m`. ``isometry`` overrides sampling.
    The channel and the optimizer use substreams of ``seed`` keyed by
    ``(p, d, m, field, trial)``.
    """
    p = parse_order(p)
    if p <= 1:
        raise InvalidOrderError(f"p must be > 1, got {p}")
    m = critical_m(d, p) if m is None else int(m)
    if not 1 <= m <= d * d:
        raise DimensionError(f"need 1 <= m <= d^2 = {d * d}, got {m}")
    base = RngStream(seed).child("violation", p, d, m, field, trial)
    if isometry is None:
        isometry = haar_isometry(m, d, d, field, base.child("channel"))
    channel = PartialTraceChannel(isometry)
    if isometry.field_tag == "real":
        _check_real_conjugate(channel)

    est = estimate_max_output_norm(channel, p, cfg, base.child("optimizer"))
    bounds = certified_product_lower_bounds(channel, p)
    single_entropy = entropy_from_p_norm(est.best_value, p)
    cap = (p / (p - 1) if np.isfinite(p) else 1.0) * float(np.log(d * d / m))
    add_gap = 2 * single_entropy - bounds.entropy_ub
    return ViolationReport(
        p=p,
        d=d,
        m=m,
        seed=int(seed),
        field_tag=isometry.field_tag,
        single_norm_estimate=est.best_value,
        single_norm_detail=est.to_dict(),
        single_entropy_estimate=single_entropy,
        product_lambda_max=bounds.lambda_max,
        product_p_norm_lb=bounds.p_norm_lb,
        product_entropy_ub=bounds.entropy_ub,
        product_overlap=bounds.overlap,
        certified_entropy_cap=cap,
        multiplicativity_gap=bounds.p_norm_lb - est.best_value**2,
        additivity_gap=add_gap,
        violation_detected=bool(add_gap > 0),
        trial=trial,
        config={"p": p, "d": d, "m": m, "field": field, "seed": int(seed), "trial": trial,
                "ascent": cfg.to_dict()},
    )


@dataclass(frozen=True)
class ScanGrid:
    """Grid of experiment cells; ``m_rule`` is ``"critical"`` or a list of m."""

    p_values: Sequence[float] = (2.0, 3.0, 4.0)
    d_values: Sequence[int] = (8, 16, 32)
    m_rule: Union[Literal["critical"], Sequence[int]] = "critical"
    trials: int = 5
    field_tag: str = "complex"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.field_tag not in ("complex", "real"):
            raise ValueError(f"unknown field {self.field_tag!r}")
        for p, d, m in self.cells_pdm():
            if not 1 <= m <= d * d:
                raise DimensionError(f"m = {m} out of range for d = {d}")

    def m_values(self, p, d) -> List[int]:
        if isinstance(self.m_rule, str):
            if self.m_rule != "critical":
                raise ValueError(f"unknown m rule {self.m_rule!r}")
            return [critical_m(d, p)]
        return [int(m) for m in self.m_rule]

    def cells_pdm(self):
        for p, d in product(self.p_values, self.d_values):
            for m in self.m_values(parse_order(p), d):
                yield parse_order(p), int(d), m

    def cells(self):
        for p, d, m in self.cells_pdm():
            for t in range(self.trials):
                yield p, d, m, t

    def to_dict(self) -> dict:
        return {
            "p_values": [float(p) for p in self.p_values],
            "d_values": [int(d) for d in self.d_values],
            "m_rule": self.m_rule if isinstance(self.m_rule, str) else [int(m) for m in self.m_rule],
            "trials": self.trials,
            "field": self.field_tag,
        }

    @classmethod
    def from_dict(cls, obj) -> "ScanGrid":
        kw = {}
        if "p_values" in obj:
            kw["p_values"] = tuple(float_or_inf(p) for p in obj["p_values"])
        if "d_values" in obj:
            kw["d_values"] = tuple(int(d) for d in obj["d_values"])
        if "m_rule" in obj:
            rule = obj["m_rule"]
            kw["m_rule"] = rule if isinstance(rule, str) else tuple(int(m) for m in rule)
        if "trials" in obj:
            kw["trials"] = int(obj["trials"])
        if "field" in obj:
            kw["field_tag"] = obj["field"]
        return cls(**kw)


def summarize(reports: Sequence[ViolationReport]) -> List[dict]:
    """Per ``(p, d, m)``: fraction of trials with a violation and mean gaps."""
    groups: dict = {}
    for r in reports:
        groups.setdefault((r.p, r.d, r.m), []).append(r)
    out = []
    for (p, d, m), rs in groups.items():
        out.append({
            "p": p, "d": d, "m": m, "trials": len(rs),
            "violation_fraction": float(np.mean([r.violation_detected for r in rs])),
            "mean_additivity_gap": float(np.mean([r.additivity_gap for r in rs])),
            "mean_multiplicativity_gap": float(np.mean([r.multiplicativity_gap for r in rs])),
            "mean_single_norm_estimate": float(np.mean([r.single_norm_estimate for r in rs])),
            "min_product_lambda_max_over_bound": float(min(r.product_lambda_max * d * d / m for r in rs)),
        })
    return out


def run_scan(grid: ScanGrid = ScanGrid(), cfg: AscentConfig = AscentConfig(),
             master_seed: int = 0, threads: int = 1):
    """One report per ``(p, d, m, trial)`` cell, in that order, plus a summary.

    Cells are independent and may run on ``threads`` workers; the output is
    the same for any thread count.
    """
    cells = list(grid.cells())

    def one(cell):
        p, d, m, t = cell
        return run_violation(p, d, m, grid.field_tag, master_seed, cfg, trial=t)

    if threads == 1:
        reports = [one(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads or None) as pool:
            reports = list(pool.map(one, cells))
    return reports, summarize(reports)
