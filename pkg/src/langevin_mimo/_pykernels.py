"""Pure-NumPy sampler inner loops, vectorized across trajectories.

This is the fallback for (and the reference implementation of) the compiled
kernels in ``_kernels``.  Both backends share one contract: they evolve a
batch of trajectories in place through every annealing level, consuming
pre-generated level noise, and they implement the identical arithmetic, so
results agree to floating-point reordering error.

Per-level quantities (step sizes, pseudo-inverse diagonals, case-split
flags) are precomputed by the caller; see ``langevin._prepare_levels``.
Flag encoding per coordinate: 0 = prior score only (zero singular value),
1 = likelihood + prior, 2 = likelihood only.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _scores(chi, v_mat, s, eta, inv_d, flags, sig2, levels):
    """Combined spectral score for a (M, n) batch of positions."""
    x = chi @ v_mat.T
    d2 = (x[..., None] - levels) ** 2
    d2 -= d2.min(axis=-1, keepdims=True)
    w = np.exp(-d2 / (2.0 * sig2))
    denoised = (w @ levels) / w.sum(axis=-1)
    spectral_prior = ((denoised - x) / sig2) @ v_mat

    lik = s * inv_d * (eta - s * chi)
    return np.where(flags != 0, lik, 0.0) + np.where(flags != 2, spectral_prior, 0.0)


def evolve_underdamped(
    chi,
    vel,
    noise,
    v_mat,
    s,
    eta,
    lambdas,
    inv_d,
    flags,
    sig2s,
    levels,
    h_over_m,
    ou_a,
    ou_noise,
):
    """Run all annealing levels of the kinetic sampler, in place.

    chi, vel: (M, n) trajectory states; noise: (M, L, T, n) pre-drawn unit
    normals; per step the position drifts by h_over_m * vel, the velocity
    takes the step-matrix-scaled score kick at the updated position, then
    the exact OU damping/refresh with multiplier ou_a and noise scale
    ou_noise * lambda.
    """
    n_levels, n_steps = lambdas.shape[0], noise.shape[2]
    for level in range(n_levels):
        lam = lambdas[level]
        for k in range(n_steps):
            chi += h_over_m * vel
            sc = _scores(
                chi, v_mat, s, eta, inv_d[level], flags[level], sig2s[level], levels
            )
            vel += lam * sc
            vel *= ou_a
            vel += (ou_noise * lam) * noise[:, level, k, :]


def evolve_overdamped(
    chi,
    noise,
    v_mat,
    s,
    eta,
    lambdas,
    sqrt_lambdas,
    inv_d,
    flags,
    sig2s,
    levels,
    sqrt_2tau,
):
    """Run all annealing levels of the position-only sampler, in place.

    Per step: chi += lambda * score(chi) + sqrt(2 tau) * sqrt(lambda) * w.
    """
    n_levels, n_steps = lambdas.shape[0], noise.shape[2]
    for level in range(n_levels):
        lam = lambdas[level]
        sqlam = sqrt_lambdas[level]
        for k in range(n_steps):
            sc = _scores(
                chi, v_mat, s, eta, inv_d[level], flags[level], sig2s[level], levels
            )
            chi += lam * sc
            chi += (sqrt_2tau * sqlam) * noise[:, level, k, :]
