"""Closed-loop episodes, Monte Carlo batches and post-learning evaluation.

At every step the CE, dual and oracle controllers are all solved at the
same belief state (shadow solves); only the input of the applied policy
drives the plant. Noise comes from :mod:`dualmpc.noise`, keyed by the
episode seed, so different policies on the same episode see identical
disturbances.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .belief import mat, update
from .errors import DualMpcError, EpisodeError
from .infocost import effective_alpha, weight_matrix
from .metrics import (
    StepMetrics,
    covariance_sensitivity,
    oracle_mismatch,
    parameter_error,
    separation_gap,
)
from .mpc import Policy, build_qp_dual, solve_policy
from .noise import noise_block
from .plant import joint_vector, regulation_cost, step
from .qp import solve_box

log = logging.getLogger(__name__)

SERIES = ("J_reg_cum", "trace_Sigma", "S", "G", "E_par", "M_orc")


@dataclass(frozen=True)
class EpisodeConfig:
    n_steps: int = 100
    x0: tuple = (0.4, 0.1)
    seed: int = 0
    applied_policy: Policy = Policy.DUAL
    learning_enabled: bool = True

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        object.__setattr__(self, "applied_policy", Policy(self.applied_policy))
        object.__setattr__(self, "x0", tuple(float(v) for v in np.ravel(self.x0)))


@dataclass(frozen=True)
class StepRecord:
    t: int
    x: np.ndarray
    u_applied: np.ndarray
    u_ce: np.ndarray
    u_dual: np.ndarray
    u_oracle: np.ndarray
    w: np.ndarray
    metrics: StepMetrics
    alpha_eff: float
    dual_active: tuple


@dataclass(frozen=True)
class EpisodeLog:
    config: EpisodeConfig
    records: tuple
    final_belief: object

    def series(self, name):
        """Per-step values of a metric (``S``, ``G``, ...) or record field."""
        if name in StepMetrics.__dataclass_fields__:
            return np.array([getattr(r.metrics, name) for r in self.records])
        return np.array([getattr(r, name) for r in self.records])


def _shift(U, m):
    return np.concatenate([U[m:], U[-m:]])


def run_episode(plant, prior, mpc_cfg, ep_cfg):
    """Run one closed-loop episode and log every step."""
    n, m = plant.n, plant.m
    if prior.n != n or prior.m != m or mpc_cfg.n != n or mpc_cfg.m != m:
        raise DualMpcError("plant, prior and MPC config dimensions disagree")
    x = np.array(ep_cfg.x0, dtype=float)
    if x.shape != (n,):
        raise DualMpcError(f"x0 must have length {n}")
    noise = noise_block(ep_cfg.seed, ep_cfg.n_steps, n, plant.sigma_w2)
    Theta_star = plant.Theta_star
    belief = prior
    alpha_cap = mpc_cfg.alpha
    J = 0.0
    warm = {}
    records = []

    for t in range(ep_cfg.n_steps):
        try:
            def solve(kind, cfg):
                u0 = warm.get(kind) if mpc_cfg.warm_start else None
                sol = solve_policy(kind, x, belief, plant, cfg, u0=u0)
                warm[kind] = _shift(sol.u_star, m)
                return sol

            sol_ce = solve(Policy.CE, mpc_cfg)
            W = weight_matrix(belief.Sigma, mpc_cfg.sigma_w2, n, m)
            alpha_t = effective_alpha(mpc_cfg.Q, mpc_cfg.R, W, alpha_cap)
            if mpc_cfg.latch_alpha:
                alpha_cap = alpha_t
            cfg_t = replace(mpc_cfg, alpha=alpha_t)
            sol_dual = solve(Policy.DUAL, cfg_t)
            u_ce, u_dual = sol_ce.u_star[:m], sol_dual.u_star[:m]

            A_hat, B_hat = mat(belief.theta_hat, n, m)

            def dual_fn(x_, theta_, Sigma_):
                qp = build_qp_dual(x_, A_hat, B_hat, Sigma_, cfg_t)
                return solve_box(qp.H, qp.f, qp.lb, qp.ub, tol=cfg_t.qp_tol).u_star[:m]

            S = separation_gap(u_dual, u_ce)
            G = covariance_sensitivity(x, belief.theta_hat, belief.Sigma, cfg_t, dual_fn,
                                       u_nominal=u_dual)
            u_orc = solve(Policy.ORACLE, mpc_cfg).u_star[:m]
            u = {Policy.CE: u_ce, Policy.DUAL: u_dual, Policy.ORACLE: u_orc}[ep_cfg.applied_policy]

            J += regulation_cost(x, u, mpc_cfg.Q, mpc_cfg.R)
            w = noise[t]
            x_next = step(plant, x, u, w)
            metrics = StepMetrics(
                S=S,
                G=G,
                E_par=parameter_error(belief.theta_hat, Theta_star),
                M_orc=oracle_mismatch(u, u_orc),
                trace_Sigma=float(np.trace(belief.Sigma)),
                J_reg_cum=J,
            )
            records.append(StepRecord(
                t=t, x=x, u_applied=u.copy(), u_ce=u_ce, u_dual=u_dual, u_oracle=u_orc,
                w=w, metrics=metrics, alpha_eff=alpha_t,
                dual_active=sol_dual.active_lower + sol_dual.active_upper,
            ))
            if ep_cfg.learning_enabled:
                belief = update(belief, joint_vector(x, u), x_next, mpc_cfg.sigma_w2)
            x = x_next
        except DualMpcError as exc:
            raise EpisodeError(str(exc), step=t) from exc

    return EpisodeLog(ep_cfg, tuple(records), belief)


@dataclass(frozen=True)
class MonteCarloResult:
    """Episode logs per policy; ``episodes[i][e]`` is policy ``policies[i]`` on episode e."""

    policies: tuple
    episodes: tuple

    def __getitem__(self, policy):
        return self.episodes[self.policies.index(Policy(policy))]

    def aggregate(self, series=SERIES):
        """``{policy: {series: (mean, std)}}`` over episodes, per time step."""
        out = {}
        for pol, logs in zip(self.policies, self.episodes):
            out.setdefault(pol, {s: aggregate(logs, s) for s in series})
        return out


def aggregate(logs, name):
    """Mean and (population) standard deviation of a series across episodes."""
    data = np.stack([log_.series(name) for log_ in logs])
    # shifting by the first episode keeps identical episodes exactly zero-spread
    dev = data - data[0]
    return data[0] + dev.mean(axis=0), dev.std(axis=0)


def _run_job(args):
    return run_episode(*args)


def _run_jobs(jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_job, jobs))
    return [_run_job(j) for j in jobs]


def run_monte_carlo(plant, prior, mpc_cfg, base_seed, n_episodes, policy_list,
                    n_steps=100, x0=(0.4, 0.1), learning_enabled=True, workers=1):
    """Run every policy on episodes seeded ``base_seed + e`` for e < n_episodes."""
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    policies = tuple(Policy(p) for p in policy_list)
    jobs = [
        (plant, prior, mpc_cfg,
         EpisodeConfig(n_steps, x0, base_seed + e, pol, learning_enabled))
        for pol in policies for e in range(n_episodes)
    ]
    logs = _run_jobs(jobs, workers)
    episodes = tuple(tuple(logs[i * n_episodes:(i + 1) * n_episodes])
                     for i in range(len(policies)))
    return MonteCarloResult(policies, episodes)


def _per_episode(beliefs, n_episodes):
    if isinstance(beliefs, (list, tuple)):
        if len(beliefs) != n_episodes:
            raise ValueError(f"expected {n_episodes} beliefs, got {len(beliefs)}")
        return list(beliefs)
    return [beliefs] * n_episodes


def run_post_learning(plant, belief_ce_final, belief_dual_final, mpc_cfg, base_seed,
                      n_episodes, n_steps=100, x0=(0.4, 0.1), workers=1):
    """Frozen-model, alpha = 0 comparison of the two identified models.

    Each belief argument is either one belief used for every episode or a
    sequence with one belief per episode (paired with the learning run).
    Returns ``(ce_learned_logs, dual_learned_logs)``.
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    cfg = replace(mpc_cfg, alpha=0.0)
    arms = [_per_episode(belief_ce_final, n_episodes),
            _per_episode(belief_dual_final, n_episodes)]
    jobs = [
        (plant, arm[e], cfg,
         EpisodeConfig(n_steps, x0, base_seed + e, Policy.CE, learning_enabled=False))
        for arm in arms for e in range(n_episodes)
    ]
    logs = _run_jobs(jobs, workers)
    return tuple(logs[:n_episodes]), tuple(logs[n_episodes:])
