"""Reproducible process-noise streams for common-random-number experiments.

Each episode seed drives a counter-based Philox generator. The draw for
step ``t`` and state component ``i`` always comes from the same pair of
uniforms, mapped to a standard normal by the Box-Muller transform, so every
policy run on that episode sees the identical noise sequence.
"""

import numpy as np


def standard_normal_block(seed, n_steps, n):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    uniforms = rng.random((n_steps, n, 2))
    radius = np.sqrt(-2.0 * np.log1p(-uniforms[..., 0]))
    return radius * np.cos(2.0 * np.pi * uniforms[..., 1])


def noise_block(seed, n_steps, n, sigma_w2):
    """``(n_steps, n)`` array of i.i.d. N(0, sigma_w2) draws for one episode."""
    if sigma_w2 < 0:
        raise ValueError("sigma_w2 must be >= 0")
    if sigma_w2 == 0:
        return np.zeros((n_steps, n))
    return np.sqrt(sigma_w2) * standard_normal_block(seed, n_steps, n)
