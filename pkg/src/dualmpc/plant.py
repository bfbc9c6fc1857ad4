"""Ground-truth stochastic linear plant ``x+ = A x + B u + w``."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotSymmetricError


@dataclass(frozen=True)
class Plant:
    """True dynamics (A*, B*) and per-component process-noise variance.

    ``sigma_w2`` may be zero, which gives a noiseless plant for testing;
    the estimator's assumed noise variance is configured separately and
    must stay strictly positive.
    """

    A_star: np.ndarray
    B_star: np.ndarray
    sigma_w2: float

    def __post_init__(self):
        A = np.array(self.A_star, dtype=float, ndmin=2)
        B = np.array(self.B_star, dtype=float, ndmin=2)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A_star must be square, got shape {A.shape}")
        if B.ndim != 2 or B.shape[0] != A.shape[0]:
            raise DimensionError(
                f"B_star must have {A.shape[0]} rows, got shape {B.shape}")
        if not np.isfinite(self.sigma_w2) or self.sigma_w2 < 0:
            raise ValueError(f"sigma_w2 must be >= 0, got {self.sigma_w2}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A_star", A)
        object.__setattr__(self, "B_star", B)
        object.__setattr__(self, "sigma_w2", float(self.sigma_w2))

    @property
    def n(self):
        return self.A_star.shape[0]

    @property
    def m(self):
        return self.B_star.shape[1]

    @property
    def Theta_star(self):
        """The stacked parameter matrix ``[A* B*]``."""
        return np.hstack([self.A_star, self.B_star])


def double_integrator(ts=0.1, sigma_w2=5e-4):
    """Zero-order-hold discretised double integrator with sampling time ``ts``."""
    A = np.array([[1.0, ts], [0.0, 1.0]])
    B = np.array([[0.5 * ts**2], [ts]])
    return Plant(A, B, sigma_w2)


def joint_vector(x, u):
    """Stack state and input into ``z = [x; u]``."""
    return np.concatenate([np.asarray(x, dtype=float).ravel(),
                           np.asarray(u, dtype=float).ravel()])


def step(plant, x, u, w):
    """Propagate one step of the true dynamics with externally supplied noise."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    n, m = plant.n, plant.m
    if x.shape != (n,) or u.shape != (m,) or w.shape != (n,):
        raise DimensionError(
            f"expected x:({n},), u:({m},), w:({n},); "
            f"got {x.shape}, {u.shape}, {w.shape}")
    return plant.A_star @ x + plant.B_star @ u + w


def _check_symmetric(M, name):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise NotSymmetricError(f"{name} is not symmetric")


def regulation_cost(x, u, Q, R):
    """Quadratic regulation cost ``x'Qx + u'Ru``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    _check_symmetric(Q, "Q")
    _check_symmetric(R, "R")
    if Q.shape[0] != x.size or R.shape[0] != u.size:
        raise DimensionError("cost matrices do not match x, u dimensions")
    return float(x @ Q @ x + u @ R @ u)
