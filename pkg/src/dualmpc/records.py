"""CSV and JSON serialisation of episode logs, aggregates and beliefs."""

import csv
import json

import numpy as np

from .belief import ParamBelief
from .sim import SERIES

METRIC_COLUMNS = ("S", "G", "E_par", "M_orc", "trace_Sigma", "J_reg_cum")
AGGREGATE_HEADER = ("t", "policy", "series", "mean", "std")


def fmt(value):
    return format(float(value), ".17g")


def episode_header(n, m):
    cols = ["t"] + [f"x{i + 1}" for i in range(n)]
    for prefix in ("u_applied", "u_ce", "u_dual", "u_orc"):
        cols += [f"{prefix}_{j + 1}" for j in range(m)]
    return cols + list(METRIC_COLUMNS) + ["alpha_eff"]


def episode_rows(log):
    for r in log.records:
        row = [str(r.t)] + [fmt(v) for v in r.x]
        for u in (r.u_applied, r.u_ce, r.u_dual, r.u_oracle):
            row += [fmt(v) for v in u]
        row += [fmt(getattr(r.metrics, c)) for c in METRIC_COLUMNS]
        row.append(fmt(r.alpha_eff))
        yield row


def write_episode_csv(log, path):
    first = log.records[0]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(episode_header(first.x.size, first.u_applied.size))
        writer.writerows(episode_rows(log))


def read_csv(path):
    """Return ``(header, rows)`` with rows as lists of strings."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


def aggregate_rows(aggregates, label=str):
    """Long-format rows from ``{policy: {series: (mean, std)}}``."""
    for policy, series in aggregates.items():
        for name in SERIES:
            if name not in series:
                continue
            mean, std = series[name]
            for t, (mu, sd) in enumerate(zip(mean, std)):
                yield [str(t), label(policy), name, fmt(mu), fmt(sd)]


def write_aggregate_csv(aggregates, path, label=lambda p: getattr(p, "value", str(p))):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_HEADER)
        writer.writerows(aggregate_rows(aggregates, label))


def write_beliefs(beliefs, path):
    """Write one belief (JSON object) or a sequence of beliefs (JSON list)."""
    if isinstance(beliefs, ParamBelief):
        payload = beliefs.to_dict()
    else:
        payload = [b.to_dict() for b in beliefs]
    with open(path, "w") as fh:
        json.dump(payload, fh)


def read_beliefs(path):
    """Inverse of :func:`write_beliefs`; returns a belief or a list of beliefs."""
    with open(path) as fh:
        payload = json.load(fh)
    if isinstance(payload, list):
        return [ParamBelief.from_dict(d) for d in payload]
    return ParamBelief.from_dict(payload)


def write_sidecar(path, config_dict, log):
    ep = log.config
    payload = {
        "config": config_dict,
        "episode": {
            "seed": ep.seed,
            "policy": ep.applied_policy.value,
            "n_steps": ep.n_steps,
            "x0": list(ep.x0),
            "learning_enabled": ep.learning_enabled,
        },
        "final_belief": log.final_belief.to_dict(),
        "noise": np.array([r.w for r in log.records]).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
