"""Separation and validation metrics evaluated from shadow policy solves."""

from dataclasses import dataclass

import numpy as np

from .belief import mat


@dataclass(frozen=True)
class StepMetrics:
    S: float
    G: float
    E_par: float
    M_orc: float
    trace_Sigma: float
    J_reg_cum: float


def separation_gap(u_dual, u_ce):
    """Euclidean distance between dual and CE inputs at the same belief state."""
    return float(np.linalg.norm(np.asarray(u_dual, float) - np.asarray(u_ce, float)))


def covariance_sensitivity(x, theta_hat, Sigma, cfg, dual_policy, u_nominal=None):
    """Finite-difference response of the dual law to scaling Sigma by ``1 + eps``.

    ``dual_policy(x, theta_hat, Sigma)`` must return the dual first input.
    ``u_nominal`` may carry an already computed ``dual_policy(x, theta_hat, Sigma)``.
    Returns 0 when ``Sigma`` vanishes, since both evaluations then coincide.
    """
    eps = cfg.epsilon
    if not eps > 0:
        raise ValueError("epsilon must be > 0")
    Sigma = np.asarray(Sigma, dtype=float)
    norm = np.linalg.norm(Sigma, "fro")
    if norm == 0:
        return 0.0
    if u_nominal is None:
        u_nominal = dual_policy(x, theta_hat, Sigma)
    u_pert = dual_policy(x, theta_hat, (1.0 + eps) * Sigma)
    return float(np.linalg.norm(np.asarray(u_pert) - np.asarray(u_nominal)) / (eps * norm))


def parameter_error(theta_hat, Theta_star):
    """Frobenius distance between the estimated and true ``[A B]``."""
    Theta_star = np.asarray(Theta_star, dtype=float)
    n, d = Theta_star.shape
    A_hat, B_hat = mat(theta_hat, n, d - n)
    return float(np.linalg.norm(np.hstack([A_hat, B_hat]) - Theta_star, "fro"))


def oracle_mismatch(u_applied, u_oracle):
    return float(np.linalg.norm(np.asarray(u_applied, float) - np.asarray(u_oracle, float)))
