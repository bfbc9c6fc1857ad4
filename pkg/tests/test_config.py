import json

import numpy as np
import pytest

from dualmpc import config
from dualmpc.errors import ConfigError
from dualmpc.mpc import Policy


class TestDefaults:
    def test_reference_experiment(self):
        cfg = config.parse({})
        np.testing.assert_allclose(cfg.plant.A_star, [[1, 0.1], [0, 1]])
        np.testing.assert_allclose(cfg.plant.B_star, [[0.005], [0.1]])
        assert cfg.plant.sigma_w2 == 5e-4
        np.testing.assert_array_equal(cfg.mpc.Q, np.diag([10.0, 1.0]))
        np.testing.assert_array_equal(cfg.mpc.P, cfg.mpc.Q)
        np.testing.assert_array_equal(cfg.mpc.R, [[1.0]])
        assert (cfg.mpc.N, cfg.mpc.alpha, cfg.mpc.epsilon) == (3, 1.0, 0.05)
        assert cfg.mpc.sigma_w2 == 5e-4
        np.testing.assert_array_equal(cfg.prior.Sigma, np.eye(6))
        assert cfg.experiment["n_steps"] == 100 and cfg.experiment["n_episodes"] == 20
        assert cfg.policies == [Policy.CE, Policy.DUAL, Policy.ORACLE]
        assert cfg.post_settings() == (100, 20, (0.4, 0.1), 0)

    def test_explicit_theta(self):
        cfg = config.parse({"prior": {"theta_hat": [1, 0, 0, 1, 0, 0.1], "sigma0_scale": 2.0}})
        np.testing.assert_array_equal(cfg.prior.theta_hat, [1, 0, 0, 1, 0, 0.1])
        np.testing.assert_array_equal(cfg.prior.Sigma, 2 * np.eye(6))

    def test_zero_plant_noise_needs_filter_variance(self):
        with pytest.raises(ConfigError) as info:
            config.parse({"plant": {"sigma_w2": 0.0}})
        assert info.value.field == "mpc.filter_sigma_w2"
        cfg = config.parse({"plant": {"sigma_w2": 0.0}, "mpc": {"filter_sigma_w2": 1e-3}})
        assert cfg.plant.sigma_w2 == 0.0 and cfg.mpc.sigma_w2 == 1e-3


class TestRoundTrip:
    def test_dump_load(self, tmp_path):
        cfg = config.parse({"mpc": {"alpha": 0.5}, "experiment": {"n_steps": 7}})
        path = tmp_path / "c.json"
        config.dump(cfg, path)
        back = config.load(path)
        assert back.to_dict() == cfg.to_dict()
        np.testing.assert_array_equal(back.prior.theta_hat, cfg.prior.theta_hat)

    def test_overrides(self):
        cfg = config.parse({}, {"mpc.alpha": 0.0, "experiment.policies": ["dual"]})
        assert cfg.mpc.alpha == 0.0
        assert cfg.policies == [Policy.DUAL]

    def test_to_dict_is_copy(self):
        cfg = config.parse({})
        d = cfg.to_dict()
        d["mpc"]["N"] = 99
        assert cfg.data["mpc"]["N"] == 3


class TestErrors:
    @pytest.mark.parametrize("raw, field", [
        ({"nope": {}}, "nope"),
        ({"mpc": {"horizon": 3}}, "mpc.horizon"),
        ({"mpc": {"N": 0}}, "mpc.N"),
        ({"mpc": {"N": 2.5}}, "mpc.N"),
        ({"mpc": {"Q": [[1, 0], [0, -1]]}}, "mpc.Q"),
        ({"mpc": {"R": [[1, 0], [0, 1]]}}, "mpc.R"),
        ({"mpc": {"u_min": [10], "u_max": [-10]}}, "mpc.u_max"),
        ({"mpc": {"alpha": -1}}, "mpc.alpha"),
        ({"mpc": {"epsilon": 0}}, "mpc.epsilon"),
        ({"mpc": {"latch_alpha": "yes"}}, "mpc.latch_alpha"),
        ({"plant": {"A": [[1, 0]]}}, "plant.A"),
        ({"plant": {"sigma_w2": -1}}, "plant.sigma_w2"),
        ({"prior": {"bias_B": [[0.1]]}}, "prior.bias_B"),
        ({"prior": {"theta_hat": [1, 2]}}, "prior.theta_hat"),
        ({"prior": {"sigma0_scale": 0}}, "prior.sigma0_scale"),
        ({"experiment": {"policies": ["greedy"]}}, "experiment.policies"),
        ({"experiment": {"x0": [1, 2, 3]}}, "experiment.x0"),
        ({"experiment": {"n_episodes": 0}}, "experiment.n_episodes"),
        ({"output": {"formats": ["png"]}}, "output.formats"),
    ])
    def test_field_named(self, raw, field):
        with pytest.raises(ConfigError) as info:
            config.parse(raw)
        assert info.value.field == field

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            config.load(tmp_path / "absent.json")

    def test_bad_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ConfigError):
            config.load(p)

    def test_root_must_be_object(self, tmp_path):
        p = tmp_path / "list.json"
        p.write_text(json.dumps([1, 2]))
        with pytest.raises(ConfigError):
            config.load(p)
