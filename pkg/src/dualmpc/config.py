"""JSON run configuration with defaults that reproduce the reference experiment.

Every section is optional; missing keys take the defaults below (a
double integrator with ``Ts = 0.1``, ``sigma_w2 = 5e-4``, ``Q = diag(10, 1)``,
``R = 1``, ``P = Q``, ``N = 3``, ``|u| <= 10``, ``x0 = [0.4, 0.1]``,
``Sigma0 = I``, ``alpha = 1``, ``eps = 0.05``, 100 steps, 20 episodes).
"""

import copy
import json
from dataclasses import dataclass

import numpy as np

from .belief import ParamBelief, prior_from_bias
from .errors import ConfigError
from .mpc import MpcConfig, Policy
from .plant import Plant, double_integrator

_DI = double_integrator(0.1, 5e-4)

DEFAULTS = {
    "plant": {
        "A": _DI.A_star.tolist(),
        "B": _DI.B_star.tolist(),
        "sigma_w2": 5e-4,
    },
    "prior": {
        "bias_A": [[0.5, 0.5], [0.0, 0.25]],
        "bias_B": [[0.1], [0.25]],
        "theta_hat": None,
        "sigma0_scale": 1.0,
    },
    "mpc": {
        "N": 3,
        "Q": [[10.0, 0.0], [0.0, 1.0]],
        "R": [[1.0]],
        "P": None,
        "u_min": [-10.0],
        "u_max": [10.0],
        "alpha": 1.0,
        "epsilon": 0.05,
        "filter_sigma_w2": None,
        "latch_alpha": True,
        "warm_start": False,
        "qp_tol": 1e-9,
    },
    "experiment": {
        "n_steps": 100,
        "n_episodes": 20,
        "base_seed": 0,
        "x0": [0.4, 0.1],
        "policies": ["ce", "dual", "oracle"],
        "post_learning": True,
        "post_n_steps": None,
        "post_n_episodes": None,
        "post_x0": None,
        "post_seed": None,
        "workers": 1,
    },
    "output": {
        "directory": "results",
        "formats": ["csv", "json", "svg"],
    },
}

FORMATS = ("csv", "json", "svg")


@dataclass(frozen=True)
class RunConfig:
    """A validated configuration plus the objects built from it."""

    data: dict
    plant: Plant
    prior: ParamBelief
    mpc: MpcConfig

    @property
    def experiment(self):
        return self.data["experiment"]

    @property
    def output(self):
        return self.data["output"]

    @property
    def policies(self):
        return [Policy(p) for p in self.experiment["policies"]]

    def post_settings(self):
        """``(n_steps, n_episodes, x0, seed)`` for the post-learning runs."""
        e = self.experiment

        def pick(key, fallback):
            return e[key] if e[key] is not None else e[fallback]

        return (pick("post_n_steps", "n_steps"), pick("post_n_episodes", "n_episodes"),
                tuple(pick("post_x0", "x0")), pick("post_seed", "base_seed"))

    def to_dict(self):
        return copy.deepcopy(self.data)


def _merge(raw):
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    data = copy.deepcopy(DEFAULTS)
    for section, values in raw.items():
        if section not in data:
            raise ConfigError(section, "unknown section")
        if not isinstance(values, dict):
            raise ConfigError(section, "must be an object")
        for key, value in values.items():
            if key not in data[section]:
                raise ConfigError(f"{section}.{key}", "unknown field")
            data[section][key] = value
    return data


def _matrix(data, field, ndim=2):
    section, key = field.split(".")
    try:
        arr = np.array(data[section][key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(field, f"not a numeric array ({exc})") from None
    if arr.ndim != ndim:
        raise ConfigError(field, f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(field, "contains non-finite values")
    return arr


def _number(data, field, minimum=None, strict=False, integer=False):
    section, key = field.split(".")
    value = data[section][key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(field, f"expected an integer, got {value!r}")
    if minimum is not None and (value <= minimum if strict else value < minimum):
        raise ConfigError(field, f"must be {'>' if strict else '>='} {minimum}, got {value}")
    return int(value) if integer else float(value)


def _flag(data, field):
    section, key = field.split(".")
    if not isinstance(data[section][key], bool):
        raise ConfigError(field, "expected true or false")
    return data[section][key]


def validate(data):
    """Check every field and build the plant, prior and MPC config."""
    A = _matrix(data, "plant.A")
    B = _matrix(data, "plant.B")
    sigma_w2 = _number(data, "plant.sigma_w2", minimum=0.0)
    if A.shape[0] != A.shape[1]:
        raise ConfigError("plant.A", f"must be square, got {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise ConfigError("plant.B", f"must have {A.shape[0]} rows, got {B.shape}")
    plant = Plant(A, B, sigma_w2)
    n, m = plant.n, plant.m

    scale = _number(data, "prior.sigma0_scale", minimum=0.0, strict=True)
    if data["prior"]["theta_hat"] is not None:
        theta = _matrix(data, "prior.theta_hat", ndim=1)
        if theta.size != n * (n + m):
            raise ConfigError("prior.theta_hat", f"must have length {n * (n + m)}")
        prior = ParamBelief(theta, scale * np.eye(theta.size), n, m)
    else:
        bias_A = _matrix(data, "prior.bias_A")
        bias_B = _matrix(data, "prior.bias_B")
        if bias_A.shape != (n, n):
            raise ConfigError("prior.bias_A", f"must be {n}x{n}")
        if bias_B.shape != (n, m):
            raise ConfigError("prior.bias_B", f"must be {n}x{m}")
        prior = prior_from_bias(plant, bias_A, bias_B, scale)

    N = _number(data, "mpc.N", minimum=1, integer=True)
    Q = _matrix(data, "mpc.Q")
    R = _matrix(data, "mpc.R")
    P = Q if data["mpc"]["P"] is None else _matrix(data, "mpc.P")
    for name, M, size in (("Q", Q, n), ("R", R, m), ("P", P, n)):
        if M.shape != (size, size):
            raise ConfigError(f"mpc.{name}", f"must be {size}x{size}, got {M.shape}")
        if not np.allclose(M, M.T) or np.linalg.eigvalsh(M)[0] <= 0:
            raise ConfigError(f"mpc.{name}", "must be symmetric positive definite")
    u_min = _matrix(data, "mpc.u_min", ndim=1)
    u_max = _matrix(data, "mpc.u_max", ndim=1)
    for name, v in (("u_min", u_min), ("u_max", u_max)):
        if v.shape != (m,):
            raise ConfigError(f"mpc.{name}", f"must have length {m}")
    if not np.all(u_min < u_max):
        raise ConfigError("mpc.u_max", "must exceed u_min elementwise")
    alpha = _number(data, "mpc.alpha", minimum=0.0)
    epsilon = _number(data, "mpc.epsilon", minimum=0.0, strict=True)
    if data["mpc"]["filter_sigma_w2"] is None:
        filt = sigma_w2
        if filt <= 0:
            raise ConfigError("mpc.filter_sigma_w2",
                              "required (> 0) when plant.sigma_w2 is 0")
    else:
        filt = _number(data, "mpc.filter_sigma_w2", minimum=0.0, strict=True)
    qp_tol = _number(data, "mpc.qp_tol", minimum=0.0, strict=True)
    mpc = MpcConfig(N=N, Q=Q, R=R, P=P, u_min=u_min, u_max=u_max, alpha=alpha,
                    epsilon=epsilon, sigma_w2=filt,
                    latch_alpha=_flag(data, "mpc.latch_alpha"),
                    warm_start=_flag(data, "mpc.warm_start"), qp_tol=qp_tol)

    _number(data, "experiment.n_steps", minimum=1, integer=True)
    _number(data, "experiment.n_episodes", minimum=1, integer=True)
    _number(data, "experiment.base_seed", minimum=0, integer=True)
    _number(data, "experiment.workers", minimum=1, integer=True)
    x0 = _matrix(data, "experiment.x0", ndim=1)
    if x0.shape != (n,):
        raise ConfigError("experiment.x0", f"must have length {n}")
    pols = data["experiment"]["policies"]
    if not isinstance(pols, list) or not pols:
        raise ConfigError("experiment.policies", "must be a nonempty list")
    for p in pols:
        try:
            Policy(p)
        except ValueError:
            raise ConfigError("experiment.policies",
                              f"unknown policy {p!r} (expected ce, dual or oracle)") from None
    _flag(data, "experiment.post_learning")
    for key in ("post_n_steps", "post_n_episodes", "post_seed"):
        if data["experiment"][key] is not None:
            _number(data, f"experiment.{key}", minimum=0 if key == "post_seed" else 1,
                    integer=True)
    if data["experiment"]["post_x0"] is not None:
        if _matrix(data, "experiment.post_x0", ndim=1).shape != (n,):
            raise ConfigError("experiment.post_x0", f"must have length {n}")

    if not isinstance(data["output"]["directory"], str):
        raise ConfigError("output.directory", "must be a string")
    fmts = data["output"]["formats"]
    if not isinstance(fmts, list) or any(f not in FORMATS for f in fmts):
        raise ConfigError("output.formats", f"must be a list drawn from {list(FORMATS)}")

    return RunConfig(data, plant, prior, mpc)


def parse(raw, overrides=None):
    """Merge ``raw`` over the defaults, apply ``{"section.key": value}`` overrides, validate."""
    data = _merge(raw)
    for field, value in (overrides or {}).items():
        section, key = field.split(".")
        data[section][key] = value
    return validate(data)


def load(path=None, overrides=None):
    if path is None:
        raw = {}
    else:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", f"invalid JSON in {path}: {exc}") from None
    return parse(raw, overrides)


def dump(cfg, path):
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2)
