"""Annealed posterior score in the channel's spectral coordinates.

The sampler state lives in the spectral domain chi = V^T x, where
H_real = U diag(s) V^T.  The posterior score at annealing level sigma_l
splits into a likelihood term, diagonal in that basis, and a prior term
computed per real coordinate from the Gaussian-smoothed PAM alphabet and
rotated back with V^T.  The two are combined with a per-coordinate case
split keyed on how the level noise compares to the observation noise.

All functions broadcast over leading axes, so a (M, 2*nu) batch of sampler
states is handled in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .constellation import Constellation

# diagonal entries at or below this are treated as exact zeros when
# pseudo-inverting |sigma0'^2 I - sigma_l^2 Sigma Sigma^T|
PINV_EPS = 1e-12


@dataclass(frozen=True)
class NoiseSchedule:
    """Strictly decreasing positive annealing levels sigma_1 > ... > sigma_L."""

    levels: np.ndarray

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        if levels.ndim != 1 or levels.size < 1:
            raise ValueError("schedule must be a non-empty 1-D array")
        if np.any(levels <= 0):
            raise ValueError("noise levels must be positive")
        if np.any(np.diff(levels) >= 0):
            raise ValueError("noise levels must be strictly decreasing")
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        return self.levels.size

    def __getitem__(self, i) -> float:
        return float(self.levels[i])


def likelihood_score(
    chi, eta, chan: ChannelRealization, sigma_l: float
) -> np.ndarray:
    """Gradient of the observation log-likelihood w.r.t. the spectral state.

    Computes Sigma^T |sigma0'^2 I - sigma_l^2 Sigma Sigma^T|^+ (eta - Sigma chi)
    with sigma0'^2 = noise_var / 2 (per-real-coordinate noise variance), the
    absolute value taken entrywise on the diagonal, and zero diagonal entries
    pseudo-inverted to zero.
    """
    s = chan.singular_values
    n = s.shape[0]
    chi = np.asarray(chi, dtype=float)
    if chi.shape[-1] != n:
        raise ValueError(f"chi last axis {chi.shape[-1]} != {n}")
    eta = np.asarray(eta, dtype=float)
    if eta.shape[-1] < n:
        raise ValueError(f"eta has {eta.shape[-1]} entries, needs >= {n}")
    eta_head = eta[..., :n]

    sigma0r2 = chan.noise_var / 2.0
    d = np.abs(sigma0r2 - (sigma_l**2) * s**2)
    inv = np.where(d > PINV_EPS, 1.0 / np.where(d > PINV_EPS, d, 1.0), 0.0)
    return s * inv * (eta_head - s * chi)


def denoise(x_tilde, sigma_l: float, c: Constellation) -> np.ndarray:
    """Posterior mean of the PAM level given a Gaussian-blurred coordinate.

    Per coordinate: sum_k p_k w_k / sum_k w_k with
    w_k = exp(-(x - p_k)^2 / (2 sigma_l^2)), evaluated with the max weight
    factored out so extreme inputs cannot underflow to 0/0.  The output is a
    convex combination of the PAM levels.
    """
    if sigma_l <= 0:
        raise ValueError(f"sigma_l must be positive, got {sigma_l}")
    x = np.asarray(x_tilde, dtype=float)
    lv = c.pam_levels
    d2 = (x[..., None] - lv) ** 2
    d2 -= d2.min(axis=-1, keepdims=True)
    w = np.exp(-d2 / (2.0 * sigma_l**2))
    return (w @ lv) / w.sum(axis=-1)


def prior_score(x_tilde, sigma_l: float, c: Constellation) -> np.ndarray:
    """Score of the Gaussian-smoothed constellation prior (Tweedie form)."""
    x = np.asarray(x_tilde, dtype=float)
    return (denoise(x, sigma_l, c) - x) / sigma_l**2


def combined_score(
    chi, eta, chan: ChannelRealization, sigma_l: float, c: Constellation
) -> np.ndarray:
    """Full annealed posterior score in the spectral domain.

    Per coordinate j (with sigma0' the per-real-coordinate noise std):
    zero singular value -> prior term only; sigma0' >= sigma_l * s_j ->
    likelihood + prior; otherwise likelihood only.
    """
    chi = np.asarray(chi, dtype=float)
    s = chan.singular_values
    sigma0r = np.sqrt(chan.noise_var / 2.0)

    x = chi @ chan.svd_v.T
    spectral_prior = prior_score(x, sigma_l, c) @ chan.svd_v
    lik = likelihood_score(chi, eta, chan, sigma_l)

    use_lik = s > 0.0
    use_prior = (s == 0.0) | (sigma0r >= sigma_l * s)
    return np.where(use_lik, lik, 0.0) + np.where(use_prior, spectral_prior, 0.0)
