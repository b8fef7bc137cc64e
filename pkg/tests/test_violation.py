import json

import numpy as np
import pytest

from renyi_dvoretzky import io
from renyi_dvoretzky.ensembles import Isometry
from renyi_dvoretzky.errors import DimensionError, InvalidOrderError
from renyi_dvoretzky.optimize import AscentConfig
from renyi_dvoretzky.violation import ScanGrid, critical_m, run_scan, run_violation

FAST = AscentConfig(restarts=4, max_iters=200, sample_baseline=200)


class TestCriticalM:
    def test_values(self):
        assert critical_m(16, 2) == 64
        assert critical_m(4, 2) == 8
        assert critical_m(32, 3) == 102

    def test_p_infinite(self):
        assert critical_m(7, np.inf) == 7
        assert critical_m(7, 1e9) == 7

    def test_clamped(self):
        assert critical_m(2, 1.01) == 4

    def test_invalid(self):
        with pytest.raises(InvalidOrderError):
            critical_m(4, 1)


class TestRunViolation:
    def test_identity_channel(self):
        rep = run_violation(2, 3, 9, seed=0, cfg=FAST, isometry=Isometry.identity(3))
        assert rep.single_norm_estimate == pytest.approx(1, abs=1e-8)
        assert rep.product_p_norm_lb == pytest.approx(1, abs=1e-12)
        assert rep.multiplicativity_gap == pytest.approx(0, abs=1e-8)
        assert not rep.violation_detected

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_d4_m8(self, seed):
        rep = run_violation(2, 4, 8, seed=seed, cfg=FAST)
        assert rep.product_lambda_max >= 0.5 - 1e-9
        assert rep.product_p_norm_lb >= rep.product_lambda_max
        assert rep.product_entropy_ub <= rep.certified_entropy_cap + 1e-9
        assert 4**-0.5 - 1e-9 <= rep.single_norm_estimate <= 1 + 1e-9
        assert rep.violation_detected == (rep.additivity_gap > 0)

    def test_real_field(self):
        rep = run_violation(3, 5, None, field="real", seed=3, cfg=FAST)
        assert rep.field_tag == "real"
        assert rep.m == critical_m(5, 3)
        assert rep.product_lambda_max >= rep.m / 25 - 1e-9

    def test_report_fields(self):
        rep = run_violation(2, 4, 8, seed=4, cfg=FAST)
        d = rep.to_dict()
        assert d["schema"] == "v1"
        assert d["certification"]["product_lambda_max"] == "certified"
        assert d["certification"]["single_norm_estimate"] == "estimate"
        assert d["config"]["seed"] == 4
        assert d["bits"]["additivity_gap"] == pytest.approx(rep.additivity_gap / np.log(2))

    def test_bad_m(self):
        with pytest.raises(DimensionError):
            run_violation(2, 3, 10, cfg=FAST)


class TestScan:
    def test_single_cell_equals_run_violation(self):
        grid = ScanGrid(p_values=[2], d_values=[4], m_rule=[8], trials=1)
        reports, summary = run_scan(grid, FAST, master_seed=11)
        direct = run_violation(2, 4, 8, "complex", 11, FAST, trial=0)
        assert io.dumps(reports[0]) == io.dumps(direct)
        assert summary[0]["trials"] == 1

    def test_order_and_summary(self):
        grid = ScanGrid(p_values=[2, 3], d_values=[3, 4], trials=2)
        reports, summary = run_scan(grid, FAST, master_seed=5)
        assert [(r.p, r.d, r.trial) for r in reports] == [
            (p, d, t) for p in (2.0, 3.0) for d in (3, 4) for t in range(2)]
        assert len(summary) == 4
        for row in summary:
            assert 0 <= row["violation_fraction"] <= 1
            assert row["min_product_lambda_max_over_bound"] >= 1 - 1e-9

    def test_thread_count_irrelevant(self):
        grid = ScanGrid(p_values=[2], d_values=[3, 4], trials=2)
        a, _ = run_scan(grid, FAST, 9, threads=1)
        b, _ = run_scan(grid, FAST, 9, threads=4)
        assert io.dumps(a) == io.dumps(b)

    def test_real_vs_complex(self):
        for field in ("real", "complex"):
            reports, _ = run_scan(ScanGrid(p_values=[2], d_values=[4], trials=2, field_tag=field), FAST, 3)
            for r in reports:
                assert r.field_tag == field
                assert r.product_lambda_max >= r.m / 16 - 1e-9

    def test_grid_roundtrip(self):
        grid = ScanGrid(p_values=[2, np.inf], d_values=[4], m_rule=[3, 5], trials=1, field_tag="real")
        back = ScanGrid.from_dict(json.loads(io.dumps(grid.to_dict())))
        assert back == ScanGrid(p_values=(2.0, np.inf), d_values=(4,), m_rule=(3, 5), trials=1, field_tag="real")

    def test_grid_validation(self):
        with pytest.raises(DimensionError):
            ScanGrid(d_values=[2], m_rule=[5])
        with pytest.raises(ValueError):
            ScanGrid(trials=0)
