"""Command-line front end: ``dualmpc run | mc | post-learn``.

Exit codes: 0 on success, 2 for configuration or input-file errors,
3 when a run fails (solver or episode error).
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import config as config_mod
from . import records
from .errors import ConfigError, DualMpcError
from .mpc import Policy
from .sim import EpisodeConfig, SERIES, aggregate, run_episode, run_monte_carlo, run_post_learning
from .svg import write_chart

log = logging.getLogger("dualmpc")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

CHARTS = {
    "J_reg_cum": ("cumulative_cost.svg", "Cumulative regulation cost"),
    "trace_Sigma": ("trace_sigma.svg", "Posterior covariance trace"),
    "S": ("separation_gap.svg", "Separation gap"),
    "G": ("covariance_sensitivity.svg", "Covariance sensitivity"),
    "E_par": ("parameter_error.svg", "Parameter error"),
    "M_orc": ("oracle_mismatch.svg", "Oracle mismatch"),
}


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="base seed")
    common.add_argument("--alpha", type=float, help="exploration weight")
    common.add_argument("--episodes", type=int, help="number of Monte Carlo episodes")
    common.add_argument("--steps", type=int, help="steps per episode")
    common.add_argument("--policy", choices=[p.value for p in Policy],
                        help="restrict to a single policy")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="dualmpc", description="Dual MPC with online Bayesian identification.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="one episode per policy")
    sub.add_parser("mc", parents=[common], help="Monte Carlo batch with aggregates and charts")
    post = sub.add_parser("post-learn", parents=[common],
                          help="frozen-model alpha=0 comparison of learned beliefs")
    post.add_argument("--ce-belief", metavar="PATH",
                      help="CE-learned belief JSON (default: <out>/beliefs_ce.json)")
    post.add_argument("--dual-belief", metavar="PATH",
                      help="dual-learned belief JSON (default: <out>/beliefs_dual.json)")
    return parser


def _overrides(args):
    out = {}
    if args.seed is not None:
        out["experiment.base_seed"] = args.seed
    if args.alpha is not None:
        out["mpc.alpha"] = args.alpha
    if args.episodes is not None:
        out["experiment.n_episodes"] = args.episodes
    if args.steps is not None:
        out["experiment.n_steps"] = args.steps
    if args.policy is not None:
        out["experiment.policies"] = [args.policy]
    if args.out is not None:
        out["output.directory"] = args.out
    return out


def _curves(aggregates, name):
    curves = []
    for label, series in aggregates.items():
        mean, std = series[name]
        curves.append((label, np.arange(mean.size), mean, std))
    return curves


def _write_charts(outdir, aggregates, prefix=""):
    for name, (fname, title) in CHARTS.items():
        write_chart(os.path.join(outdir, prefix + fname), title, _curves(aggregates, name),
                    xlabel="time step", ylabel=name)


def cmd_run(cfg):
    outdir = cfg.output["directory"]
    os.makedirs(outdir, exist_ok=True)
    exp = cfg.experiment
    logs = [
        run_episode(cfg.plant, cfg.prior, cfg.mpc,
                    EpisodeConfig(exp["n_steps"], exp["x0"], exp["base_seed"], pol, True))
        for pol in cfg.policies
    ]
    for lg in logs:
        stem = f"episode_{lg.config.applied_policy.value}_{lg.config.seed}"
        if "csv" in cfg.output["formats"]:
            records.write_episode_csv(lg, os.path.join(outdir, stem + ".csv"))
        if "json" in cfg.output["formats"]:
            records.write_sidecar(os.path.join(outdir, stem + ".json"), cfg.to_dict(), lg)
        m = lg.records[-1].metrics
        print(f"{lg.config.applied_policy.value}: J_reg={m.J_reg_cum:.6g} "
              f"E_par={m.E_par:.4g} trace_Sigma={m.trace_Sigma:.4g}")
    return EXIT_OK


def _summary(result):
    """Final-step means and the S / trace(Sigma) sample correlation per policy."""
    out = {}
    for pol in dict.fromkeys(result.policies):
        logs = result[pol]
        S = np.concatenate([lg.series("S") for lg in logs])
        tr = np.concatenate([lg.series("trace_Sigma") for lg in logs])
        corr = float(np.corrcoef(S, tr)[0, 1]) if S.std() > 0 and tr.std() > 0 else None
        out[pol.value] = {
            "final_mean": {s: float(np.mean([lg.series(s)[-1] for lg in logs])) for s in SERIES},
            "corr_S_trace_Sigma": corr,
        }
    return out


def cmd_mc(cfg):
    outdir = cfg.output["directory"]
    exp = cfg.experiment
    fmts = cfg.output["formats"]
    result = run_monte_carlo(cfg.plant, cfg.prior, cfg.mpc, exp["base_seed"],
                             exp["n_episodes"], cfg.policies, n_steps=exp["n_steps"],
                             x0=tuple(exp["x0"]), workers=exp["workers"])
    post = None
    if exp["post_learning"] and Policy.CE in result.policies and Policy.DUAL in result.policies:
        n_steps, n_eps, x0, seed = cfg.post_settings()
        ce_b = [lg.final_belief for lg in result[Policy.CE]]
        du_b = [lg.final_belief for lg in result[Policy.DUAL]]
        if n_eps != len(ce_b):
            ce_b, du_b = ce_b[0], du_b[0]
        post = run_post_learning(cfg.plant, ce_b, du_b, cfg.mpc, seed, n_eps,
                                 n_steps=n_steps, x0=x0, workers=exp["workers"])

    os.makedirs(outdir, exist_ok=True)
    aggregates = {p.value: s for p, s in result.aggregate().items()}
    if "csv" in fmts:
        for pol, logs in zip(result.policies, result.episodes):
            for lg in logs:
                records.write_episode_csv(
                    lg, os.path.join(outdir, f"episode_{pol.value}_{lg.config.seed}.csv"))
        records.write_aggregate_csv(aggregates, os.path.join(outdir, "aggregate.csv"))
    if "json" in fmts:
        for pol in dict.fromkeys(result.policies):
            records.write_beliefs([lg.final_belief for lg in result[pol]],
                                  os.path.join(outdir, f"beliefs_{pol.value}.json"))
        config_mod.dump(cfg, os.path.join(outdir, "config.json"))
        with open(os.path.join(outdir, "summary.json"), "w") as fh:
            json.dump(_summary(result), fh, indent=2)
    if "svg" in fmts:
        _write_charts(outdir, aggregates)
    if post is not None:
        _write_post(outdir, fmts, *post)

    for pol, info in _summary(result).items():
        fm = info["final_mean"]
        print(f"{pol}: J_reg={fm['J_reg_cum']:.6g} E_par={fm['E_par']:.4g} "
              f"trace_Sigma={fm['trace_Sigma']:.4g} S={fm['S']:.4g}")
    return EXIT_OK


def _write_post(outdir, fmts, ce_logs, dual_logs):
    aggregates = {
        "ce_learned": {s: aggregate(ce_logs, s) for s in SERIES},
        "dual_learned": {s: aggregate(dual_logs, s) for s in SERIES},
    }
    if "csv" in fmts:
        records.write_aggregate_csv(aggregates, os.path.join(outdir, "post_aggregate.csv"))
    if "svg" in fmts:
        write_chart(os.path.join(outdir, "post_learning_cost.svg"),
                    "Post-learning cumulative regulation cost (alpha = 0)",
                    _curves(aggregates, "J_reg_cum"), xlabel="time step", ylabel="J_reg_cum")
    for arm, series in aggregates.items():
        print(f"post-learning {arm}: J_reg={series['J_reg_cum'][0][-1]:.6g}")


def _load_beliefs(path, cfg, n_episodes, what):
    try:
        beliefs = records.read_beliefs(path)
    except OSError as exc:
        raise ConfigError(what, f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(what, f"invalid belief file {path}: {exc}") from None
    items = beliefs if isinstance(beliefs, list) else [beliefs]
    for b in items:
        if (b.n, b.m) != (cfg.plant.n, cfg.plant.m):
            raise ConfigError(what, f"belief dimensions ({b.n}, {b.m}) do not match the plant")
    if isinstance(beliefs, list):
        if len(beliefs) == 1:
            return beliefs[0]
        if len(beliefs) != n_episodes:
            raise ConfigError(what, f"holds {len(beliefs)} beliefs, expected 1 or {n_episodes}")
    return beliefs


def cmd_post_learn(cfg, ce_path=None, dual_path=None):
    outdir = cfg.output["directory"]
    n_steps, n_eps, x0, seed = cfg.post_settings()
    ce_path = ce_path or os.path.join(outdir, "beliefs_ce.json")
    dual_path = dual_path or os.path.join(outdir, "beliefs_dual.json")
    ce_b = _load_beliefs(ce_path, cfg, n_eps, "--ce-belief")
    du_b = _load_beliefs(dual_path, cfg, n_eps, "--dual-belief")
    ce_logs, dual_logs = run_post_learning(cfg.plant, ce_b, du_b, cfg.mpc, seed, n_eps,
                                           n_steps=n_steps, x0=x0,
                                           workers=cfg.experiment["workers"])
    os.makedirs(outdir, exist_ok=True)
    _write_post(outdir, cfg.output["formats"], ce_logs, dual_logs)
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_mod.load(args.config, _overrides(args))
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "mc":
            return cmd_mc(cfg)
        return cmd_post_learn(cfg, args.ce_belief, args.dual_belief)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DualMpcError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
