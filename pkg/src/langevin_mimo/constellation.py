"""Square QAM alphabets, per-coordinate PAM rounding, and symbol error counting.

A square K-QAM constellation factors into two independent sqrt(K)-ary PAM
alphabets, one per real coordinate.  Everything downstream (denoising,
rounding, error counting) works on those PAM levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Constellation:
    """Unit-average-power square QAM alphabet.

    ``complex_points`` enumerates all K symbols; ``pam_levels`` is the
    sqrt(K)-ary alphabet of each real coordinate, sorted ascending, so that
    ``complex_points == {a + jb : a, b in pam_levels}``.  ``normalization``
    is the scale applied to the integer grid to get unit mean symbol power.
    Arrays are read-only; instances are safe to share between threads.
    """

    order: int
    complex_points: np.ndarray
    pam_levels: np.ndarray
    normalization: float

    def __post_init__(self):
        # Rounding resolves distance ties toward the entry that comes first
        # here: smaller magnitude, negative before positive.
        by_mag = np.array(
            sorted(self.pam_levels, key=lambda v: (abs(v), v)), dtype=float
        )
        by_mag.setflags(write=False)
        object.__setattr__(self, "_levels_by_magnitude", by_mag)


def make_qam(k: int) -> Constellation:
    """Build the unit-power square QAM constellation of order ``k``.

    ``k`` must be a perfect square >= 4 (4, 16, 64, ...).
    """
    if k < 4:
        raise ValueError(f"QAM order must be >= 4, got {k}")
    side = math.isqrt(k)
    if side * side != k:
        raise ValueError(f"QAM order must be a perfect square, got {k}")

    raw = np.arange(-(side - 1), side, 2, dtype=float)
    # mean |a+jb|^2 over the grid = 2 * mean(raw^2); scale that to 1
    scale = 1.0 / math.sqrt(2.0 * np.mean(raw**2))
    levels = raw * scale
    points = (levels[:, None] + 1j * levels[None, :]).ravel()

    levels.setflags(write=False)
    points.setflags(write=False)
    return Constellation(
        order=k, complex_points=points, pam_levels=levels, normalization=scale
    )


def nearest(values, constellation: Constellation):
    """Round real value(s) to the closest PAM level of the constellation.

    Ties go to the level with smaller absolute value (negative first when
    magnitudes tie too).  Accepts scalars or arrays; the output matches the
    input shape.
    """
    v = np.asarray(values, dtype=float)
    lv = constellation._levels_by_magnitude
    idx = np.argmin(np.abs(v[..., None] - lv), axis=-1)
    out = lv[idx]
    if np.isscalar(values) or np.ndim(values) == 0:
        return float(out)
    return out


def ser(estimate, truth) -> float:
    """Fraction of complex symbols that differ between two symbol arrays."""
    est = np.asarray(estimate)
    tru = np.asarray(truth)
    if est.shape != tru.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {tru.shape}")
    if est.size == 0:
        raise ValueError("empty symbol arrays")
    return float(np.mean(est != tru))
