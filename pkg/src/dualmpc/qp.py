"""Dense strictly convex QP with box constraints.

Solves ``min 0.5 u'Hu + f'u  s.t.  lb <= u <= ub`` with a primal
active-set method. Every working-set choice (blocking bound, released
bound) uses the smallest-index rule, so results are bit-for-bit
reproducible. If the working set changes more than ``10 d`` times the
solver switches to projected gradient with Armijo backtracking.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotPositiveDefiniteError, NotSymmetricError, SolverError

PD_REL_TOL = 1e-12


@dataclass(frozen=True)
class QpSolution:
    u_star: np.ndarray
    kkt_residual: float
    iterations: int
    active_lower: tuple
    active_upper: tuple


def kkt_residual(H, f, lb, ub, u):
    """Infinity norm of the projected-gradient step ``u - clip(u - grad, lb, ub)``."""
    g = H @ u + f
    return float(np.max(np.abs(u - np.clip(u - g, lb, ub)), initial=0.0))


def objective(H, f, u):
    return float(0.5 * u @ H @ u + f @ u)


def _validate(H, f, lb, ub):
    H = np.atleast_2d(np.asarray(H, dtype=float))
    f = np.atleast_1d(np.asarray(f, dtype=float))
    lb = np.atleast_1d(np.asarray(lb, dtype=float))
    ub = np.atleast_1d(np.asarray(ub, dtype=float))
    d = f.size
    if H.shape != (d, d) or lb.shape != (d,) or ub.shape != (d,):
        raise DimensionError(
            f"inconsistent QP data: H{H.shape}, f{f.shape}, lb{lb.shape}, ub{ub.shape}")
    if np.any(lb > ub):
        raise ValueError("lb must not exceed ub")
    scale = np.linalg.norm(H, "fro")
    if not np.allclose(H, H.T, rtol=0.0, atol=1e-12 * max(scale, 1.0)):
        raise NotSymmetricError("H is not symmetric")
    lam = np.linalg.eigvalsh(H)[0] if d else 1.0
    if not lam > PD_REL_TOL * scale:
        raise NotPositiveDefiniteError(f"H is not positive definite (min eigenvalue {lam:.3g})",
                                       min_eig=lam)
    return H, f, lb, ub


def _active_set(H, f, lb, ub, u, max_changes, max_iter):
    d = f.size
    fixed = lb == ub
    lower = (u <= lb) | fixed
    upper = (u >= ub) & ~lower
    changes = 0
    for it in range(1, max_iter + 1):
        free = ~(lower | upper)
        if free.any():
            F = np.flatnonzero(free)
            B = np.flatnonzero(~free)
            rhs = -(f[F] + H[np.ix_(F, B)] @ u[B])
            target = np.linalg.solve(H[np.ix_(F, F)], rhs)
            p = target - u[F]
            ratios = np.full(F.size, np.inf)
            neg, pos = p < 0, p > 0
            ratios[neg] = (lb[F][neg] - u[F][neg]) / p[neg]
            ratios[pos] = (ub[F][pos] - u[F][pos]) / p[pos]
            tau = ratios.min()
            if tau < 1.0:
                k = int(np.flatnonzero(ratios == tau)[0])
                u[F] = u[F] + tau * p
                i = F[k]
                if p[k] < 0:
                    u[i], lower[i] = lb[i], True
                else:
                    u[i], upper[i] = ub[i], True
                changes += 1
                if changes > max_changes:
                    return u, it, False
                continue
            u[F] = target

        g = H @ u + f
        mult = np.where(lower, g, 0.0) - np.where(upper, g, 0.0)
        mult[fixed] = 0.0
        scale = 1.0 + np.abs(f).max(initial=0.0) + np.abs(H).max() * np.abs(u).max(initial=0.0)
        release = np.flatnonzero(mult < -1e-14 * scale)
        if release.size == 0:
            return u, it, True
        i = release[0]
        lower[i] = upper[i] = False
        changes += 1
        if changes > max_changes:
            return u, it, False
    return u, max_iter, False


def _projected_gradient(H, f, lb, ub, u, tol, max_iter):
    step = 1.0 / np.linalg.norm(H, 2)
    obj = objective(H, f, u)
    for it in range(1, max_iter + 1):
        g = H @ u + f
        if np.max(np.abs(u - np.clip(u - g, lb, ub)), initial=0.0) <= tol:
            return u, it
        s = 1.0
        while True:
            cand = np.clip(u - s * step * g, lb, ub)
            cand_obj = objective(H, f, cand)
            if cand_obj <= obj + 1e-4 * g @ (cand - u) or s < 1e-12:
                break
            s *= 0.5
        u, obj = cand, cand_obj
    return u, max_iter


def solve_box(H, f, lb, ub, tol=1e-9, u0=None):
    """Solve the box-constrained QP; ``u0`` is an optional warm start."""
    H, f, lb, ub = _validate(H, f, lb, ub)
    if not tol > 0:
        raise ValueError("tol must be positive")
    d = f.size
    max_iter = 10 * d * d + 100
    u = np.zeros(d) if u0 is None else np.asarray(u0, dtype=float).copy()
    u = np.clip(u, lb, ub)

    u, iterations, ok = _active_set(H, f, lb, ub, u, 10 * d, max_iter)
    if not ok:
        u, extra = _projected_gradient(H, f, lb, ub, u, tol, 100 * max_iter)
        iterations += extra

    res = kkt_residual(H, f, lb, ub, u)
    if res > tol:
        raise SolverError(f"box QP did not converge: KKT residual {res:.3g} > {tol:g}",
                          residual=res, iterations=iterations)
    return QpSolution(
        u_star=u,
        kkt_residual=res,
        iterations=iterations,
        active_lower=tuple(int(i) for i in np.flatnonzero(u <= lb)),
        active_upper=tuple(int(i) for i in np.flatnonzero((u >= ub) & (u > lb))),
    )
