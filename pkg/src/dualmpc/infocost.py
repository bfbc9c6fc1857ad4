"""Information-gain surrogates and the covariance-shaped stage cost.

The one-step information gain of a joint vector ``z`` under posterior
covariance ``Sigma`` is ``logdet(I + Sigma (z z' kron I_n) / s2)``. Its
first-order (trace) approximation is the quadratic form ``z' W(Sigma) z``,
which is what gets folded into the MPC stage cost as
``L(Sigma) = blkdiag(Q, R) - alpha * W(Sigma)``.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import DimensionError, DualMpcError, NotPositiveDefiniteError

log = logging.getLogger(__name__)

PD_REL_TOL = 1e-12
FALLBACK_MIN_EIG = 1e-8
FALLBACK_SHRINK = 0.9
FALLBACK_BISECTIONS = 40


def _outer_kron(z, n):
    z = np.asarray(z, dtype=float).ravel()
    return np.kron(np.outer(z, z), np.eye(n))


def _check(z, Sigma, sigma_w2):
    Sigma = np.asarray(Sigma, dtype=float)
    z = np.asarray(z, dtype=float).ravel()
    p = Sigma.shape[0]
    if Sigma.shape != (p, p) or z.size == 0 or p % z.size:
        raise DimensionError(f"Sigma {Sigma.shape} incompatible with z of length {z.size}")
    if not sigma_w2 > 0:
        raise ValueError(f"sigma_w2 must be > 0, got {sigma_w2}")
    return z, Sigma, p // z.size


def exact_info_gain(z, Sigma, sigma_w2):
    z, Sigma, n = _check(z, Sigma, sigma_w2)
    M = np.eye(Sigma.shape[0]) + Sigma @ _outer_kron(z, n) / sigma_w2
    sign, logdet = np.linalg.slogdet(M)
    if sign <= 0 or not np.isfinite(logdet):
        raise DualMpcError(f"information gain is not finite (sign={sign}, logdet={logdet})")
    return float(logdet)


def approx_info_gain(z, Sigma, sigma_w2):
    """Trace surrogate ``tr(Sigma (z z' kron I_n)) / s2``; upper-bounds the exact gain."""
    z, Sigma, n = _check(z, Sigma, sigma_w2)
    return float(np.trace(Sigma @ _outer_kron(z, n)) / sigma_w2)


def weight_matrix(Sigma, sigma_w2, n, m):
    """``W[i, j] = tr(Sigma_ij) / s2`` over the grid of ``n x n`` blocks of Sigma."""
    Sigma = np.asarray(Sigma, dtype=float)
    d = n + m
    if Sigma.shape != (n * d, n * d):
        raise DimensionError(f"Sigma must be {n * d}x{n * d}, got {Sigma.shape}")
    if not sigma_w2 > 0:
        raise ValueError(f"sigma_w2 must be > 0, got {sigma_w2}")
    blocks = Sigma.reshape(d, n, d, n)
    return np.einsum("iaja->ij", blocks) / sigma_w2


@dataclass(frozen=True)
class StageCost:
    L: np.ndarray
    min_eig: float


def regulation_weight(Q, R):
    return block_diag(np.atleast_2d(Q), np.atleast_2d(R)).astype(float)


def _min_eig(L):
    return float(np.linalg.eigvalsh(L)[0])


def _is_pd(L, min_eig):
    return min_eig > PD_REL_TOL * np.linalg.norm(L, "fro")


def stage_cost_matrix(Q, R, alpha, W):
    """``L = blkdiag(Q, R) - alpha W``; raises if the result is not positive definite."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    D = regulation_weight(Q, R)
    if D.shape != np.shape(W):
        raise DimensionError(f"W has shape {np.shape(W)}, expected {D.shape}")
    L = D if alpha == 0 else D - alpha * np.asarray(W, dtype=float)
    lam = _min_eig(L)
    if not _is_pd(L, lam):
        raise NotPositiveDefiniteError(
            f"stage cost is not positive definite (min eigenvalue {lam:.3g}); "
            f"alpha={alpha:g} is too large for the current covariance", min_eig=lam)
    return StageCost(L, lam)


def max_feasible_alpha(Q, R, W, alpha_hi):
    """Largest alpha in ``[0, alpha_hi]`` with ``min_eig(L) >= 1e-8``, by bisection."""
    D = regulation_weight(Q, R)
    W = np.asarray(W, dtype=float)
    lo, hi = 0.0, float(alpha_hi)
    for _ in range(FALLBACK_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if _min_eig(D - mid * W) >= FALLBACK_MIN_EIG:
            lo = mid
        else:
            hi = mid
    return lo


def effective_alpha(Q, R, W, alpha):
    """Return ``alpha`` if ``L`` is positive definite, else ``0.9 * alpha_max``."""
    if alpha == 0:
        return 0.0
    D = regulation_weight(Q, R)
    L = D - alpha * np.asarray(W, dtype=float)
    if _is_pd(L, _min_eig(L)):
        return float(alpha)
    alpha_eff = FALLBACK_SHRINK * max_feasible_alpha(Q, R, W, alpha)
    log.info("stage cost indefinite at alpha=%g; falling back to alpha=%.6g",
             alpha, alpha_eff)
    return alpha_eff
