import csv
import json

import numpy as np
import pytest

from renyi_dvoretzky import io
from renyi_dvoretzky.cli import main
from renyi_dvoretzky.ensembles import Isometry
from renyi_dvoretzky.errors import ShapeError

FAST = ["--restarts", "3", "--iters", "150", "--samples", "100"]


class TestMatrixFormat:
    def test_roundtrip_bit_exact(self):
        g = np.random.default_rng(0)
        a = g.standard_normal((3, 4)) + 1j * g.standard_normal((3, 4))
        a[0, 0] = 1e-300 + 1j * 5e300
        back = io.matrix_from_dict(json.loads(io.dumps(io.matrix_to_dict(a))))
        assert back.tobytes() == a.tobytes()

    def test_row_major(self):
        d = io.matrix_to_dict(np.array([[1, 2], [3, 4j]]))
        assert d["re"] == [1, 2, 3, 0] and d["im"] == [0, 0, 0, 4]

    def test_rejects_length_mismatch(self):
        with pytest.raises(ShapeError):
            io.matrix_from_dict({"rows": 2, "cols": 2, "re": [1, 2, 3], "im": [0, 0, 0, 0]})
        with pytest.raises(ShapeError):
            io.matrix_from_dict({"rows": 2, "re": [], "im": []})

    def test_floats_have_17_digits(self):
        assert io.dumps(0.1).strip() == "0.10000000000000001"
        assert io.dumps([1.0, np.inf]).strip() == '[1.0, "inf"]'
        assert io.float_or_inf("inf") == np.inf

    def test_csv(self):
        text = io.rows_to_csv([{"a": 1, "b": 0.5}, {"a": 2, "b": None}], ["a", "b"])
        assert text.splitlines() == ["a,b", "1,0.5", "2,"]


class TestCli:
    def test_channel_sample(self, tmp_path, capsys):
        out = tmp_path / "ch.json"
        assert main(["channel-sample", "--d", "4", "--m", "8", "--seed", "7", "--out", str(out)]) == 0
        iso = Isometry.from_dict(io.read_json(out))
        np.testing.assert_allclose(iso.matrix.conj().T @ iso.matrix, np.eye(8), atol=1e-10)
        assert iso.seed == 7
        out2 = tmp_path / "ch2.json"
        main(["channel-sample", "--d", "4", "--m", "8", "--seed", "7", "--out", str(out2)])
        assert out.read_bytes() == out2.read_bytes()
        assert "seed=7" in capsys.readouterr().out

    def test_channel_sample_real(self, tmp_path):
        out = tmp_path / "ch.json"
        assert main(["channel-sample", "--d", "3", "--m", "4", "--seed", "1", "--real", "--out", str(out)]) == 0
        assert all(v == 0 for v in io.read_json(out)["im"])

    def test_channel_sample_bad_dims(self, tmp_path, capsys):
        assert main(["channel-sample", "--d", "2", "--m", "5", "--out", str(tmp_path / "x")]) == 2
        assert "error" in capsys.readouterr().err

    def test_maxnorm_identity(self, tmp_path):
        ch = tmp_path / "id.json"
        io.write_json(ch, Isometry.identity(3).to_dict())
        out = tmp_path / "r.json"
        assert main(["maxnorm", "--channel", str(ch), "--p", "2", "--seed", "1", "--out", str(out)] + FAST) == 0
        rep = io.read_json(out)
        assert rep["estimate"]["best_value"] == pytest.approx(1, abs=1e-8)
        assert rep["config"]["seed"] == 1

    def test_maxnorm_repeatable(self, tmp_path):
        ch = tmp_path / "ch.json"
        main(["channel-sample", "--d", "4", "--m", "6", "--seed", "2", "--out", str(ch)])
        outs = []
        for k in range(2):
            out = tmp_path / f"r{k}.json"
            main(["maxnorm", "--channel", str(ch), "--p", "2", "--seed", "3", "--out", str(out)] + FAST)
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        value = io.read_json(tmp_path / "r0.json")["estimate"]["best_value"]
        assert 4**-0.5 <= value <= 1

    def test_maxnorm_errors(self, tmp_path):
        assert main(["maxnorm", "--channel", str(tmp_path / "missing.json"), "--p", "2"]) == 2
        ch = tmp_path / "id.json"
        io.write_json(ch, Isometry.identity(2).to_dict())
        assert main(["maxnorm", "--channel", str(ch), "--p", "1"]) == 2
        assert main(["maxnorm", "--channel", str(ch), "--p", "0.5"]) == 2

    def test_violation(self, tmp_path, capsys):
        out = tmp_path / "v.json"
        assert main(["violation", "--p", "2", "--d", "4", "--m", "8", "--seed", "1", "--out", str(out)] + FAST) == 0
        rep = io.read_json(out)["reports"][0]
        assert rep["product_lambda_max"] >= 0.5
        assert rep["seed"] == 1
        assert "p=2 d=4 m=8" in capsys.readouterr().out

    def test_violation_full_subspace(self, tmp_path):
        out = tmp_path / "v.json"
        assert main(["violation", "--p", "2", "--d", "4", "--m", "16", "--seed", "1", "--out", str(out)] + FAST) == 0
        rep = io.read_json(out)["reports"][0]
        assert isinstance(rep["multiplicativity_gap"], float)

    def test_violation_warns_small_p(self, capsys):
        assert main(["violation", "--p", "1.2", "--d", "3", "--seed", "1"] + FAST) == 0
        assert "warning" in capsys.readouterr().err

    def test_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RENYI_DVORETZKY_SEED", "123")
        out = tmp_path / "v.json"
        main(["violation", "--p", "2", "--d", "3", "--out", str(out)] + FAST)
        assert io.read_json(out)["reports"][0]["seed"] == 123

    def test_scan(self, tmp_path):
        conf = tmp_path / "scan.json"
        io.write_json(conf, {"p_values": [2, 3], "d_values": [3], "trials": 2, "seed": 4,
                             "ascent": {"restarts": 2, "max_iters": 100, "sample_baseline": 50}})
        outs = []
        for threads in ("1", "3"):
            out = tmp_path / f"s{threads}.json"
            assert main(["--threads", threads, "scan", "--config-file", str(conf), "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        data = io.read_json(tmp_path / "s1.json")
        assert len(data["reports"]) == 4 and len(data["summary"]) == 2
        assert data["config"]["seed"] == 4

    def test_scan_bad_config(self, tmp_path):
        conf = tmp_path / "scan.json"
        io.write_json(conf, {"d_values": [2], "m_rule": [9]})
        assert main(["scan", "--config-file", str(conf)]) == 2
        io.write_json(conf, {"ascent": {"bogus": 1}})
        assert main(["scan", "--config-file", str(conf)]) == 2

    def test_dvoretzky_estimate_m(self, tmp_path):
        out = tmp_path / "m.json"
        assert main(["dvoretzky", "estimate-m", "--d", "16", "--q", "2", "--samples", "100",
                     "--seed", "1", "--out", str(out)]) == 0
        assert io.read_json(out)["stats"]["M_hat"] == 1.0

    def test_dvoretzky_estimate_m_inf(self, tmp_path):
        out = tmp_path / "m.json"
        assert main(["dvoretzky", "estimate-m", "--d", "64", "--q", "inf", "--seed", "1", "--out", str(out)]) == 0
        stats = io.read_json(out)["stats"]
        assert stats["q"] == "inf"
        assert 1.8 <= stats["M_hat"] * 8 <= 2.3

    def test_dvoretzky_window_csv(self, tmp_path):
        out, rows = tmp_path / "w.json", tmp_path / "w.csv"
        assert main(["dvoretzky", "window", "--d", "6", "--q", "4", "--m", "8", "--trials", "3",
                     "--seed", "2", "--out", str(out), "--csv", str(rows)] + FAST) == 0
        with open(rows) as fh:
            table = list(csv.DictReader(fh))
        assert list(table[0]) == ["d", "q", "m", "trial", "max_ratio", "min_ratio"]
        assert len(table) == 3
        for r in table:
            assert 6 ** (0.25 - 0.5) - 1e-9 <= float(r["min_ratio"]) <= float(r["max_ratio"]) <= 1 + 1e-9

    def test_dvoretzky_shrink(self, tmp_path):
        out, rows = tmp_path / "s.json", tmp_path / "s.csv"
        assert main(["dvoretzky", "shrink", "--d", "4", "--q", "inf", "--m-list", "4,8,16", "--trials", "2",
                     "--seed", "3", "--out", str(out), "--csv", str(rows)] + FAST) == 0
        sweep = io.read_json(out)["sweep"]
        assert [p["m"] for p in sweep] == [4, 8, 16]
        assert len(rows.read_text().splitlines()) == 1 + 3 * 2

    def test_dvoretzky_invalid_q(self):
        assert main(["dvoretzky", "estimate-m", "--d", "4", "--q", "1.5"]) == 2
        assert main(["dvoretzky", "window", "--d", "4", "--q", "2", "--m", "3"]) == 2

    def test_usage_error(self):
        assert main(["nonsense"]) == 2
