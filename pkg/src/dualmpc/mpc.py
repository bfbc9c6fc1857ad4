"""Condensed finite-horizon MPC for the CE, dual and oracle controllers.

Predicted states are eliminated through ``X = F x0 + G U`` so that the
decision variable is the stacked input sequence ``U = [u_0; ...; u_{N-1}]``.
The resulting objective is written as ``0.5 U'HU + f'U``, which equals half
the MPC cost minus a constant independent of ``U``.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .belief import mat
from .infocost import effective_alpha, regulation_weight, stage_cost_matrix, weight_matrix
from .qp import solve_box


class Policy(str, enum.Enum):
    CE = "ce"
    DUAL = "dual"
    ORACLE = "oracle"


@dataclass(frozen=True)
class MpcConfig:
    """Horizon, weights, input box and exploration settings.

    ``sigma_w2`` is the noise variance assumed by the estimator and by the
    information weight; it normally equals the plant's.
    ``latch_alpha`` keeps the exploration weight from ever increasing
    again within an episode once the indefiniteness fallback has reduced it.
    """

    N: int
    Q: np.ndarray
    R: np.ndarray
    P: np.ndarray
    u_min: np.ndarray
    u_max: np.ndarray
    alpha: float = 1.0
    epsilon: float = 0.05
    sigma_w2: float = 5e-4
    latch_alpha: bool = True
    warm_start: bool = False
    qp_tol: float = 1e-9

    def __post_init__(self):
        for name in ("Q", "R", "P"):
            M = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            M.setflags(write=False)
            object.__setattr__(self, name, M)
        for name in ("u_min", "u_max"):
            v = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        n, m = self.Q.shape[0], self.R.shape[0]
        if self.N < 1:
            raise ValueError("horizon N must be >= 1")
        if self.Q.shape != (n, n) or self.P.shape != (n, n) or self.R.shape != (m, m):
            raise ValueError("Q, P must be n x n and R m x m")
        for name in ("Q", "R", "P"):
            M = getattr(self, name)
            if not np.allclose(M, M.T) or np.linalg.eigvalsh(M)[0] <= 0:
                raise ValueError(f"{name} must be symmetric positive definite")
        if self.u_min.shape != (m,) or self.u_max.shape != (m,):
            raise ValueError(f"input bounds must have length {m}")
        if not np.all(self.u_min < self.u_max):
            raise ValueError("u_min must be < u_max elementwise")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not self.sigma_w2 > 0:
            raise ValueError("sigma_w2 (filter noise variance) must be > 0")
        if not self.qp_tol > 0:
            raise ValueError("qp_tol must be > 0")

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def m(self):
        return self.R.shape[0]


@dataclass(frozen=True)
class PredictionMatrices:
    F: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class BoxQp:
    H: np.ndarray
    f: np.ndarray
    lb: np.ndarray
    ub: np.ndarray


def build_prediction(A_hat, B_hat, N):
    """Stacked ``[x_1; ...; x_N] = F x_0 + G U`` for ``x+ = A x + B u``."""
    A_hat = np.atleast_2d(np.asarray(A_hat, dtype=float))
    B_hat = np.atleast_2d(np.asarray(B_hat, dtype=float))
    n, m = B_hat.shape
    if A_hat.shape != (n, n):
        raise ValueError(f"A_hat must be {n}x{n}, got {A_hat.shape}")
    powers = [np.eye(n)]
    for _ in range(N):
        powers.append(A_hat @ powers[-1])
    F = np.vstack(powers[1:])
    G = np.zeros((N * n, N * m))
    for k in range(1, N + 1):
        for j in range(k):
            G[(k - 1) * n:k * n, j * m:(j + 1) * m] = powers[k - 1 - j] @ B_hat
    return PredictionMatrices(F, G)


def condense(x, A_hat, B_hat, L, P, N, u_min, u_max):
    """Eliminate states from ``sum_k z_k' L z_k + x_N' P x_N`` over the box."""
    x = np.asarray(x, dtype=float)
    n = x.size
    m = np.atleast_2d(B_hat).shape[1]
    pred = build_prediction(A_hat, B_hat, N)
    d = n + m

    # z_k = Sz[k] U + cz[k]; x_0 is fixed, x_k for k >= 1 comes from (F, G)
    Sz = np.zeros((N * d, N * m))
    cz = np.zeros(N * d)
    cz[:n] = x
    for k in range(N):
        if k > 0:
            Sz[k * d:k * d + n] = pred.G[(k - 1) * n:k * n]
            cz[k * d:k * d + n] = pred.F[(k - 1) * n:k * n] @ x
        Sz[k * d + n:(k + 1) * d, k * m:(k + 1) * m] = np.eye(m)

    Lbig = np.kron(np.eye(N), L)
    GN = pred.G[(N - 1) * n:]
    xN_free = pred.F[(N - 1) * n:] @ x
    H = Sz.T @ Lbig @ Sz + GN.T @ P @ GN
    f = Sz.T @ Lbig @ cz + GN.T @ P @ xN_free
    H = 0.5 * (H + H.T)
    return BoxQp(H, f, np.tile(u_min, N), np.tile(u_max, N))


def build_qp_ce(x, A_hat, B_hat, cfg):
    L = regulation_weight(cfg.Q, cfg.R)
    return condense(x, A_hat, B_hat, L, cfg.P, cfg.N, cfg.u_min, cfg.u_max)


def dual_stage_cost(Sigma, cfg):
    """Information-weighted stage matrix and the exploration weight actually used."""
    W = weight_matrix(Sigma, cfg.sigma_w2, cfg.n, cfg.m)
    alpha_eff = effective_alpha(cfg.Q, cfg.R, W, cfg.alpha)
    return stage_cost_matrix(cfg.Q, cfg.R, alpha_eff, W).L, alpha_eff


def build_qp_dual(x, A_hat, B_hat, Sigma, cfg):
    L, _ = dual_stage_cost(Sigma, cfg)
    return condense(x, A_hat, B_hat, L, cfg.P, cfg.N, cfg.u_min, cfg.u_max)


def first_input(qp, m, tol=1e-9, u0=None):
    return solve_box(qp.H, qp.f, qp.lb, qp.ub, tol=tol, u0=u0).u_star[:m]


def solve_policy(kind, x, belief, plant, cfg, u0=None):
    """Build and solve the QP of ``kind``; returns the full :class:`QpSolution`."""
    kind = Policy(kind)
    if kind is Policy.ORACLE:
        qp = build_qp_ce(x, plant.A_star, plant.B_star, cfg)
    else:
        A_hat, B_hat = mat(belief.theta_hat, belief.n, belief.m)
        if kind is Policy.CE:
            qp = build_qp_ce(x, A_hat, B_hat, cfg)
        else:
            qp = build_qp_dual(x, A_hat, B_hat, belief.Sigma, cfg)
    return solve_box(qp.H, qp.f, qp.lb, qp.ub, tol=cfg.qp_tol, u0=u0)


def policy(kind, x, belief, plant, cfg):
    """First optimal input of the CE, dual or oracle MPC at state ``x``."""
    return solve_policy(kind, x, belief, plant, cfg).u_star[:cfg.m]
