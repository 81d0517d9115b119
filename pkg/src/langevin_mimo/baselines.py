"""Classical linear detectors (zero-forcing and linear MMSE).

Both reuse the channel's cached SVD, so one detection costs a couple of
matrix-vector products: with H_real = U diag(s) V^T and eta = U^T y_real,
the ZF estimate is V diag(1/s) eta and the MMSE estimate is
V diag(s / (s^2 + c)) eta.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelRealization, Observation
from .constellation import Constellation
from .langevin import DetectionResult, _finish


def zf_estimate(obs: Observation, chan: ChannelRealization) -> np.ndarray:
    """Pseudo-inverse solution in the real lift, before rounding.

    Singular values below 1e-10 * s_max are treated as zero, so rank
    deficiency degrades gracefully instead of blowing up.
    """
    s = chan.singular_values
    cutoff = 1e-10 * s.max() if s.max() > 0 else np.inf
    inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    n = s.shape[0]
    return chan.svd_v @ (inv * obs.eta[:n])


def mmse_estimate(obs: Observation, chan: ChannelRealization) -> np.ndarray:
    """Regularized linear estimate in the real lift, before rounding.

    Implements (H^T H + c I)^(-1) H^T y_real with c = noise_var / 2, the
    per-real-coordinate noise variance of the lifted model: the complex
    noise has variance sigma0^2 per complex dimension, which splits evenly
    over the two real coordinates, and the unit-average-power constellation
    is folded into the same constant.
    """
    s = chan.singular_values
    c = chan.noise_var / 2.0
    n = s.shape[0]
    return chan.svd_v @ ((s / (s**2 + c)) * obs.eta[:n])


def zf_detect(
    obs: Observation, chan: ChannelRealization, const: Constellation
) -> DetectionResult:
    """Zero-forcing detector: pseudo-inverse then per-coordinate rounding."""
    symbols, residual = _finish(zf_estimate(obs, chan), chan, const, obs.y_real)
    return DetectionResult(
        symbols=symbols, residual=residual, candidates=[(symbols, residual)]
    )


def mmse_detect(
    obs: Observation, chan: ChannelRealization, const: Constellation
) -> DetectionResult:
    """Linear MMSE detector: regularized estimate then rounding."""
    symbols, residual = _finish(mmse_estimate(obs, chan), chan, const, obs.y_real)
    return DetectionResult(
        symbols=symbols, residual=residual, candidates=[(symbols, residual)]
    )
