import csv
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from dualmpc.cli import CHARTS, main
from dualmpc.records import AGGREGATE_HEADER, read_beliefs, read_csv
from dualmpc.sim import SERIES

SVG_NS = "{http://www.w3.org/2000/svg}"
EPISODE_HEADER = ("t,x1,x2,u_applied_1,u_ce_1,u_dual_1,u_orc_1,"
                  "S,G,E_par,M_orc,trace_Sigma,J_reg_cum,alpha_eff").split(",")


def write_config(tmp_path, raw):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(raw))
    return str(p)


def column(rows, header, name):
    i = header.index(name)
    return np.array([float(r[i]) for r in rows])


@pytest.fixture(scope="module")
def mc_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("mc")
    assert main(["mc", "--episodes", "2", "--steps", "12", "--out", str(out)]) == 0
    return out


class TestRun:
    def test_oracle_schema(self, tmp_path):
        assert main(["run", "--policy", "oracle", "--steps", "5", "--out", str(tmp_path)]) == 0
        header, rows = read_csv(tmp_path / "episode_oracle_0.csv")
        assert header == EPISODE_HEADER
        assert len(rows) == 5
        assert all(len(r) == len(header) for r in rows)
        assert np.all(column(rows, header, "M_orc") == 0.0)

    def test_alpha_zero_no_gap(self, tmp_path):
        assert main(["run", "--alpha", "0", "--policy", "dual", "--steps", "10",
                     "--out", str(tmp_path)]) == 0
        header, rows = read_csv(tmp_path / "episode_dual_0.csv")
        assert np.all(column(rows, header, "S") == 0.0)

    def test_sidecar(self, tmp_path):
        assert main(["run", "--policy", "ce", "--steps", "4", "--seed", "3",
                     "--out", str(tmp_path)]) == 0
        side = json.loads((tmp_path / "episode_ce_3.json").read_text())
        assert side["config"]["experiment"]["base_seed"] == 3
        assert set(side["final_belief"]) == {"theta_hat", "Sigma", "n", "m"}
        assert np.array(side["noise"]).shape == (4, 2)

    def test_lossless_floats(self, tmp_path):
        from dualmpc import config
        from dualmpc.sim import EpisodeConfig, run_episode
        assert main(["run", "--policy", "dual", "--steps", "6", "--out", str(tmp_path)]) == 0
        cfg = config.parse({})
        log = run_episode(cfg.plant, cfg.prior, cfg.mpc, EpisodeConfig(6, (0.4, 0.1), 0))
        header, rows = read_csv(tmp_path / "episode_dual_0.csv")
        np.testing.assert_array_equal(column(rows, header, "G"), log.series("G"))
        np.testing.assert_array_equal(column(rows, header, "x2"), log.series("x")[:, 1])


class TestMonteCarlo:
    def test_aggregate_schema(self, mc_dir):
        header, rows = read_csv(mc_dir / "aggregate.csv")
        assert tuple(header) == AGGREGATE_HEADER
        pairs = {(r[1], r[2]) for r in rows}
        assert pairs == {(p, s) for p in ("ce", "dual", "oracle") for s in SERIES}
        assert len(rows) == 3 * 6 * 12

    def test_episode_files(self, mc_dir):
        for p in ("ce", "dual", "oracle"):
            for e in (0, 1):
                header, rows = read_csv(mc_dir / f"episode_{p}_{e}.csv")
                assert header == EPISODE_HEADER and len(rows) == 12

    def test_svgs(self, mc_dir):
        for fname, _ in CHARTS.values():
            root = ET.parse(mc_dir / fname).getroot()
            assert root.tag == SVG_NS + "svg"
            lines = root.findall(f"{SVG_NS}polyline")
            assert [pl.find(f"{SVG_NS}title").text for pl in lines] == ["ce", "dual", "oracle"]
            assert all(len(pl.get("points").split()) == 12 for pl in lines)

    def test_beliefs_and_summary(self, mc_dir):
        beliefs = read_beliefs(mc_dir / "beliefs_dual.json")
        assert len(beliefs) == 2 and beliefs[0].n == 2
        summary = json.loads((mc_dir / "summary.json").read_text())
        assert set(summary) == {"ce", "dual", "oracle"}
        assert "corr_S_trace_Sigma" in summary["dual"]

    def test_post_learning_outputs(self, mc_dir):
        header, rows = read_csv(mc_dir / "post_aggregate.csv")
        assert {r[1] for r in rows} == {"ce_learned", "dual_learned"}
        root = ET.parse(mc_dir / "post_learning_cost.svg").getroot()
        assert len(root.findall(f"{SVG_NS}polyline")) == 2

    def test_zero_noise_zero_std(self, tmp_path):
        cfg = write_config(tmp_path, {"plant": {"sigma_w2": 0.0},
                                      "mpc": {"filter_sigma_w2": 5e-4},
                                      "experiment": {"post_learning": False}})
        assert main(["mc", "--config", cfg, "--episodes", "1", "--steps", "8",
                     "--out", str(tmp_path / "o")]) == 0
        header, rows = read_csv(tmp_path / "o" / "aggregate.csv")
        assert all(float(r[4]) == 0.0 for r in rows)


class TestPostLearn:
    def test_identical_beliefs(self, mc_dir, tmp_path):
        b = str(mc_dir / "beliefs_ce.json")
        assert main(["post-learn", "--episodes", "2", "--steps", "10", "--ce-belief", b,
                     "--dual-belief", b, "--out", str(tmp_path)]) == 0
        with open(tmp_path / "post_aggregate.csv") as fh:
            rows = list(csv.reader(fh))[1:]
        ce = [r[3:] for r in rows if r[1] == "ce_learned"]
        du = [r[3:] for r in rows if r[1] == "dual_learned"]
        assert ce == du

    def test_defaults_from_out(self, mc_dir):
        assert main(["post-learn", "--episodes", "2", "--steps", "10",
                     "--out", str(mc_dir)]) == 0

    def test_missing_belief(self, tmp_path):
        assert main(["post-learn", "--out", str(tmp_path)]) == 2

    def test_incompatible_belief(self, tmp_path):
        p = tmp_path / "b.json"
        p.write_text(json.dumps({"theta_hat": [1.0, 0.5], "Sigma": [[1, 0], [0, 1]],
                                 "n": 1, "m": 1}))
        assert main(["post-learn", "--ce-belief", str(p), "--dual-belief", str(p),
                     "--out", str(tmp_path)]) == 2

    def test_wrong_count(self, mc_dir, tmp_path):
        b = str(mc_dir / "beliefs_ce.json")
        assert main(["post-learn", "--episodes", "3", "--ce-belief", b, "--dual-belief", b,
                     "--out", str(tmp_path)]) == 2


class TestExitCodes:
    def test_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"mpc": {"N": 0}})
        assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 2
        assert "mpc.N" in capsys.readouterr().err

    def test_unreadable_config(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "none.json")]) == 2

    def test_runtime_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"mpc": {"qp_tol": 1e-300}})
        assert main(["run", "--config", cfg, "--steps", "3", "--policy", "dual",
                     "--out", str(tmp_path)]) == 3
        assert "step 0" in capsys.readouterr().err

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "dualmpc", "run", "--policy", "oracle",
                               "--steps", "2", "--out", str(tmp_path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "episode_oracle_0.csv").exists()
