"""Independent reference computations used to freeze and check expected values.

Nothing here imports the code under test beyond plain data containers.
"""

import itertools

import numpy as np


def random_spd(rng, p, lo=0.1, hi=10.0):
    Qm, _ = np.linalg.qr(rng.standard_normal((p, p)))
    return (Qm * rng.uniform(lo, hi, p)) @ Qm.T


def random_psd(rng, p, rank=None):
    rank = p if rank is None else rank
    M = rng.standard_normal((p, rank))
    return M @ M.T / rank


def information_form_update(Sigma, z, sigma_w2, n):
    """Posterior covariance through the information (inverse) form."""
    info = np.linalg.inv(Sigma) + np.kron(np.outer(z, z), np.eye(n)) / sigma_w2
    return np.linalg.inv(info)


def log_det_gain(Sigma_prev, Sigma_next):
    """``logdet(Sigma_next^-1) - logdet(Sigma_prev^-1)`` from two explicit log-dets."""
    return np.linalg.slogdet(Sigma_prev)[1] - np.linalg.slogdet(Sigma_next)[1]


def enumerate_box_qp(H, f, lb, ub):
    """Exact box-QP minimiser by trying all 3^d lower / free / upper patterns."""
    d = f.size
    best = None
    for pattern in itertools.product((-1, 0, 1), repeat=d):
        pattern = np.array(pattern)
        u = np.where(pattern < 0, lb, np.where(pattern > 0, ub, 0.0))
        free = pattern == 0
        if free.any():
            F, B = np.flatnonzero(free), np.flatnonzero(~free)
            u[F] = np.linalg.solve(H[np.ix_(F, F)], -(f[F] + H[np.ix_(F, B)] @ u[B]))
        if np.any(u < lb - 1e-12) or np.any(u > ub + 1e-12):
            continue
        g = H @ u + f
        if np.any(g[pattern < 0] < -1e-10) or np.any(g[pattern > 0] > 1e-10):
            continue
        val = 0.5 * u @ H @ u + f @ u
        if best is None or val < best[0]:
            best = (val, u)
    return best[1]


def rollout(A, B, x0, U, m):
    """States x_0..x_N by simulating ``x+ = A x + B u`` step by step."""
    xs = [np.asarray(x0, float)]
    for k in range(U.size // m):
        xs.append(A @ xs[-1] + B @ U[k * m:(k + 1) * m])
    return xs


def mpc_cost(A, B, x0, U, L, P, m):
    """Explicit ``sum_k z_k' L z_k + x_N' P x_N`` on a rolled-out trajectory."""
    xs = rollout(A, B, x0, U, m)
    N = U.size // m
    J = 0.0
    for k in range(N):
        z = np.concatenate([xs[k], U[k * m:(k + 1) * m]])
        J += z @ L @ z
    return J + xs[N] @ P @ xs[N]


def unconstrained_mpc_lstsq(A, B, x0, Q, R, P, N):
    """Unconstrained CE-MPC minimiser from a stacked least-squares problem.

    The residual vector ``[Q^1/2 x_k; R^1/2 u_k; P^1/2 x_N]`` is affine in U;
    its columns are found by simulating unit input sequences.
    """
    m = B.shape[1]
    Qh, Rh, Ph = (np.linalg.cholesky(M).T for M in (Q, R, P))

    def residual(U):
        xs = rollout(A, B, x0, U, m)
        parts = [Qh @ xs[k] for k in range(N)]
        parts += [Rh @ U[k * m:(k + 1) * m] for k in range(N)]
        parts.append(Ph @ xs[N])
        return np.concatenate(parts)

    r0 = residual(np.zeros(N * m))
    J = np.column_stack([residual(e) - r0 for e in np.eye(N * m)])
    return np.linalg.lstsq(J, -r0, rcond=None)[0]
