"""Correlated Rayleigh MIMO channels, real-equivalent lifting, and observations.

Complex systems are lifted to an equivalent real form so the samplers can
work with real vectors throughout: a complex ``Nr x Nu`` channel H becomes
the ``2Nr x 2Nu`` block matrix [[Re H, -Im H], [Im H, Re H]], and a complex
vector x becomes [Re x; Im x].  The SVD of the lifted channel is computed
once per realization and cached, since every detector reuses it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PSD_EIG_TOL = -1e-10


def generate_rayleigh(nr: int, nu: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. circular complex Gaussian channel with E|h_ij|^2 = 1/nr.

    The 1/nr entry variance makes E||H x||^2 = nu for unit-power symbols,
    which is the normalization the SNR definition nu/(sigma0^2 * nr) assumes.
    """
    if nr < 1 or nu < 1:
        raise ValueError("channel dimensions must be >= 1")
    scale = np.sqrt(1.0 / (2.0 * nr))
    return scale * (
        rng.standard_normal((nr, nu)) + 1j * rng.standard_normal((nr, nu))
    )


def exp_corr_matrix(n: int, rho: float) -> np.ndarray:
    """Exponential spatial correlation matrix R_ij = rho^|i-j|."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"correlation coefficient must be in [0, 1), got {rho}")
    idx = np.arange(n)
    return rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix via eigendecomposition.

    Eigenvalues inside roundoff of zero are clamped to 0; genuinely negative
    ones are rejected.
    """
    w, v = np.linalg.eigh(np.asarray(mat, dtype=float))
    if np.min(w) < PSD_EIG_TOL:
        raise ValueError(f"matrix is not PSD (min eigenvalue {np.min(w):.3e})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def kronecker_channel(
    he: np.ndarray, r_rx: np.ndarray, r_tx: np.ndarray
) -> np.ndarray:
    """Apply receive/transmit correlation: R_rx^(1/2) He R_tx^(1/2)."""
    he = np.asarray(he)
    nr, nu = he.shape
    if r_rx.shape != (nr, nr) or r_tx.shape != (nu, nu):
        raise ValueError(
            f"correlation shapes {r_rx.shape}, {r_tx.shape} do not conform "
            f"to channel {he.shape}"
        )
    return psd_sqrt(r_rx) @ he @ psd_sqrt(r_tx)


def to_real_equivalent(h: np.ndarray) -> np.ndarray:
    """Lift a complex matrix to its real block form [[Re,-Im],[Im,Re]]."""
    h = np.asarray(h, dtype=complex)
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def complex_to_real_vec(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return np.concatenate([x.real, x.imag])


def real_to_complex_vec(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.shape[0] // 2
    return x[:n] + 1j * x[n:]


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw with its real lift and cached SVD factors.

    ``singular_values`` has length 2*nu, zero-padded when the channel is
    under-determined.  ``noise_var`` is the complex per-dimension noise
    variance sigma0^2 (each real coordinate carries sigma0^2 / 2).
    Immutable; safe to share across worker threads.
    """

    h_complex: np.ndarray
    h_real: np.ndarray
    svd_u: np.ndarray
    singular_values: np.ndarray
    svd_v: np.ndarray
    noise_var: float

    @classmethod
    def from_complex(cls, h: np.ndarray, noise_var: float) -> "ChannelRealization":
        if noise_var < 0:
            raise ValueError(f"noise variance must be >= 0, got {noise_var}")
        h = np.asarray(h, dtype=complex)
        h_real = to_real_equivalent(h)
        u, s, vt = np.linalg.svd(h_real, full_matrices=True)
        n_cols = h_real.shape[1]
        s_padded = np.zeros(n_cols)
        s_padded[: s.shape[0]] = s
        for arr in (h, h_real, u, s_padded, vt):
            arr.setflags(write=False)
        return cls(
            h_complex=h,
            h_real=h_real,
            svd_u=u,
            singular_values=s_padded,
            svd_v=vt.T,
            noise_var=float(noise_var),
        )

    @property
    def nr(self) -> int:
        return self.h_complex.shape[0]

    @property
    def nu(self) -> int:
        return self.h_complex.shape[1]


@dataclass(frozen=True)
class Observation:
    """A received vector with its real lift and spectral projection U^T y."""

    y: np.ndarray
    y_real: np.ndarray
    eta: np.ndarray


def observe(
    chan: ChannelRealization, x: np.ndarray, rng: np.random.Generator
) -> Observation:
    """Push symbols through the channel and add circular Gaussian noise.

    Noise covariance is sigma0^2 I over complex coordinates, i.e.
    sigma0^2 / 2 per real coordinate after lifting.
    """
    x = np.asarray(x)
    if x.shape != (chan.nu,):
        raise ValueError(f"expected {chan.nu} symbols, got shape {x.shape}")
    noise_scale = np.sqrt(chan.noise_var / 2.0)
    z = noise_scale * (
        rng.standard_normal(chan.nr) + 1j * rng.standard_normal(chan.nr)
    )
    y = chan.h_complex @ x + z
    y_real = complex_to_real_vec(y)
    eta = chan.svd_u.T @ y_real
    for arr in (y, y_real, eta):
        arr.setflags(write=False)
    return Observation(y=y, y_real=y_real, eta=eta)
