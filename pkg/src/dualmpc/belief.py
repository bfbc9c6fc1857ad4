"""Gaussian belief over the vectorised dynamics and its recursive update.

Parameters are stacked as ``theta = vec([A B])`` with column-major
(column-wise) vectorisation, so ``x_next = Phi @ theta + w`` with
``Phi = kron(z', I_n)`` and ``z = [x; u]``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DegenerateNoiseError, DimensionError

MAX_INNOVATION_COND = 1e12


def vec(Theta):
    """Column-wise vectorisation of a matrix."""
    return np.asarray(Theta, dtype=float).reshape(-1, order="F")


def mat(theta_hat, n, m):
    """Inverse of :func:`vec`: returns ``(A_hat, B_hat)``."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    if theta_hat.shape != (n * (n + m),):
        raise DimensionError(
            f"theta_hat must have length {n * (n + m)}, got {theta_hat.shape}")
    Theta = theta_hat.reshape(n, n + m, order="F")
    return Theta[:, :n], Theta[:, n:]


def regressor(z, n):
    """Regression matrix ``Phi = kron(z', I_n)`` of shape ``(n, n*len(z))``."""
    z = np.asarray(z, dtype=float).ravel()
    if z.size == 0:
        raise DimensionError("z must be nonempty")
    return np.kron(z[None, :], np.eye(n))


@dataclass(frozen=True)
class ParamBelief:
    """Posterior mean ``theta_hat`` and covariance ``Sigma`` over ``vec([A B])``."""

    theta_hat: np.ndarray
    Sigma: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        p = self.n * (self.n + self.m)
        theta = np.array(self.theta_hat, dtype=float).ravel()
        Sigma = np.array(self.Sigma, dtype=float)
        if theta.shape != (p,):
            raise DimensionError(f"theta_hat must have length {p}, got {theta.shape}")
        if Sigma.shape != (p, p):
            raise DimensionError(f"Sigma must be {p}x{p}, got {Sigma.shape}")
        theta.setflags(write=False)
        Sigma.setflags(write=False)
        object.__setattr__(self, "theta_hat", theta)
        object.__setattr__(self, "Sigma", Sigma)

    @property
    def p(self):
        return self.n * (self.n + self.m)

    @property
    def model(self):
        """Current point estimate ``(A_hat, B_hat)``."""
        return mat(self.theta_hat, self.n, self.m)

    def to_dict(self):
        return {
            "theta_hat": self.theta_hat.tolist(),
            "Sigma": self.Sigma.tolist(),
            "n": self.n,
            "m": self.m,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["theta_hat"], dtype=float),
                   np.asarray(d["Sigma"], dtype=float), int(d["n"]), int(d["m"]))


def prior_from_bias(plant, bias_A, bias_B, sigma0_scale=1.0):
    """Prior centred at ``[A* + bias_A, B* + bias_B]`` with ``Sigma0 = scale * I``."""
    A0 = plant.A_star + np.asarray(bias_A, dtype=float)
    B0 = plant.B_star + np.asarray(bias_B, dtype=float).reshape(plant.B_star.shape)
    p = plant.n * (plant.n + plant.m)
    return ParamBelief(vec(np.hstack([A0, B0])), sigma0_scale * np.eye(p),
                       plant.n, plant.m)


def update(belief, z, x_next, sigma_w2):
    """Covariance-form Bayesian linear regression update after one transition."""
    if not sigma_w2 > 0:
        raise ValueError(f"filter noise variance must be > 0, got {sigma_w2}")
    n = belief.n
    z = np.asarray(z, dtype=float).ravel()
    x_next = np.asarray(x_next, dtype=float).ravel()
    if z.shape != (n + belief.m,) or x_next.shape != (n,):
        raise DimensionError("z or x_next does not match belief dimensions")

    Phi = regressor(z, n)
    Sigma = belief.Sigma
    PhiSigma = Phi @ Sigma
    N = sigma_w2 * np.eye(n) + PhiSigma @ Phi.T
    if np.linalg.cond(N) > MAX_INNOVATION_COND:
        raise DegenerateNoiseError(
            f"innovation covariance is ill-conditioned (cond={np.linalg.cond(N):.3g})")
    # K' = N^{-1} Phi Sigma since N and Sigma are symmetric
    Kt = cho_solve(cho_factor(N), PhiSigma)
    innovation = x_next - Phi @ belief.theta_hat
    theta = belief.theta_hat + Kt.T @ innovation
    Sigma_next = Sigma - Kt.T @ PhiSigma
    Sigma_next = 0.5 * (Sigma_next + Sigma_next.T)
    return ParamBelief(theta, Sigma_next, n, belief.m)
