"""Simulation world: multipath channels, QAM blocks, one-bit observations.

Signal model per receive antenna m (OFDM block of size W, N users):

    r_m = sum_n H_{m,n} F^H s_n + nu_m,      nu_m ~ CN(0, sigma_c^2 I),

with ``H_{m,n}`` circulant from a length-``Wp`` impulse response and ``F``
the unitary DFT.  The one-bit front end keeps only the signs of the real and
imaginary parts.  Everything here is pure given an RNG stream; distinct
Monte-Carlo trials draw from disjoint substreams (see :func:`trial_rng`).
"""

from dataclasses import dataclass, field

import numpy as np

from .fourier import circulant_eigenvalues, unitary_ifft

__all__ = [
    "SystemConfig",
    "MultipathChannel",
    "SymbolBlock",
    "OneBitObservation",
    "trial_rng",
    "generate_channel",
    "subcarrier_channels",
    "draw_symbols",
    "symbol_energy",
    "snr_to_sigma",
    "transmit",
    "quantize_one_bit",
]


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and operating point of one simulated system.

    M antennas, N users, OFDM size W (power of two), channel length Wp,
    D half-levels per PAM dimension (16-QAM -> D=2, 64-QAM -> D=4),
    J multipath components, SNR in dB, noise-loading constant sigma0,
    and the master seed for reproducible trial substreams.
    """

    M: int = 32
    N: int = 4
    W: int = 64
    Wp: int = 16
    D: int = 2
    J: int = 4
    snr_db: float = 10.0
    sigma0: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if not (self.M >= self.N >= 1):
            raise ValueError(f"need M >= N >= 1, got M={self.M}, N={self.N}")
        if self.W < 2 or self.W & (self.W - 1):
            raise ValueError(f"W must be a power of two, got {self.W}")
        if not (1 <= self.Wp <= self.W):
            raise ValueError(f"need 1 <= Wp <= W, got Wp={self.Wp}")
        if self.D not in (1, 2, 4):
            raise ValueError(f"D must be one of 1, 2, 4, got {self.D}")
        if self.J < 1:
            raise ValueError(f"need J >= 1, got {self.J}")
        if self.sigma0 < 0:
            raise ValueError(f"need sigma0 >= 0, got {self.sigma0}")
        if not np.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite")


@dataclass
class MultipathChannel:
    """Impulse responses and their per-subcarrier frequency view.

    ``taps[l, m, n]`` is the l-th coefficient of the user-n to antenna-m
    impulse response; ``freq[w, m, n]`` the circulant eigenvalue at
    subcarrier w (unnormalized DFT of the zero-padded taps).
    """

    taps: np.ndarray  # (Wp, M, N) complex
    freq: np.ndarray = field(default=None)  # (W, M, N) complex

    @classmethod
    def from_taps(cls, taps, size):
        """Build the frequency view for impulse responses ``taps`` zero-padded
        to OFDM size ``size``."""
        taps = np.asarray(taps, dtype=complex)
        return cls(taps=taps, freq=circulant_eigenvalues(taps, size, axis=0))

    @property
    def sub_mats(self):
        """List of the W per-subcarrier M x N channel matrices."""
        return list(self.freq)


def trial_rng(seed, trial_id, salt=0):
    """Independent, reproducible substream for one Monte-Carlo trial."""
    return np.random.default_rng(np.random.SeedSequence((seed, salt, trial_id)))


def generate_channel(cfg, rng):
    """Draw a multipath channel: each tap is a sum of J uniform-linear-array
    steering vectors with CN(0, 1/J) gains and angles uniform on
    (-pi/2, pi/2), half-wavelength spacing.  Per-entry power is one."""
    M, N, Wp, J = cfg.M, cfg.N, cfg.Wp, cfg.J
    gains = (rng.standard_normal((Wp, N, J)) + 1j * rng.standard_normal((Wp, N, J))) * np.sqrt(
        0.5 / J
    )
    angles = rng.uniform(-np.pi / 2, np.pi / 2, size=(Wp, N, J))
    # a(theta)_m = exp(-j pi m sin(theta)) for d = lambda/2
    steering = np.exp(-1j * np.pi * np.arange(M)[:, None, None, None] * np.sin(angles))
    taps = np.einsum("mlnj,lnj->lmn", steering, gains)
    freq = circulant_eigenvalues(taps, cfg.W, axis=0)
    return MultipathChannel(taps=taps, freq=freq)


def subcarrier_channels(ch):
    """The W per-subcarrier M x N matrices."""
    return ch.sub_mats


@dataclass
class SymbolBlock:
    """QAM symbols, one length-W block per user: ``s[n, w]``."""

    s: np.ndarray  # (N, W) complex

    @property
    def per_subcarrier(self):
        """(W, N) view: row w is the symbol vector on subcarrier w."""
        return self.s.T


def draw_symbols(cfg, rng):
    """Uniform QAM block: Re/Im drawn from {+-1, +-3, ..., +-(2D-1)}."""
    levels = 2 * np.arange(cfg.D) + 1
    levels = np.concatenate([-levels[::-1], levels]).astype(float)
    re = rng.choice(levels, size=(cfg.N, cfg.W))
    im = rng.choice(levels, size=(cfg.N, cfg.W))
    return SymbolBlock(s=re + 1j * im)


def symbol_energy(D):
    """Mean complex symbol energy E|s|^2 = 2((2D)^2 - 1)/3."""
    return 2.0 * ((2 * D) ** 2 - 1) / 3.0


def snr_to_sigma(cfg):
    """Noise levels from the SNR definition E||s||^2 / E||nu_m||^2.

    Returns ``(sigma_actual, sigma_loaded)``: the per-real-dimension noise
    std sigma = sigma_c/sqrt(2) of the generated noise, and the inflated
    value sigma_actual + sigma0 handed to the detectors (loading trades a
    little detection performance for much faster convergence at high SNR).
    """
    snr_lin = 10.0 ** (cfg.snr_db / 10.0)
    sigma_c_sq = cfg.N * symbol_energy(cfg.D) / snr_lin
    sigma_actual = np.sqrt(sigma_c_sq / 2.0)
    return sigma_actual, sigma_actual + cfg.sigma0


def transmit(ch, sym, sigma, rng):
    """Unquantized receive block ``r[m, w]``; noise is CN(0, 2 sigma^2) per
    complex entry.  Implemented per subcarrier plus one inverse FFT per
    antenna, never through dense W x W matrices."""
    ds = np.einsum("wmn,nw->mw", ch.freq, sym.s)
    z = unitary_ifft(ds, axis=1)
    M, W = z.shape
    noise = sigma * (rng.standard_normal((M, W)) + 1j * rng.standard_normal((M, W)))
    return z + noise


@dataclass
class OneBitObservation:
    """Sign-quantized receive block and the noise levels attached to it.

    ``sigma`` is what the detectors are told (after loading); whereas
    ``sigma_actual`` generated the noise.
    """

    q: np.ndarray  # (M, W) complex, entries in {+-1 +- j}
    sigma: float
    sigma_actual: float


def quantize_one_bit(r, sigma, sigma_actual=None):
    """One-bit quantization ``q = sgn(Re r) + j sgn(Im r)``.

    Exact zeros map to +1 (probability-zero under continuous noise; fixed
    for reproducibility).
    """
    q = np.where(r.real >= 0, 1.0, -1.0) + 1j * np.where(r.imag >= 0, 1.0, -1.0)
    if sigma_actual is None:
        sigma_actual = sigma
    return OneBitObservation(q=q, sigma=float(sigma), sigma_actual=float(sigma_actual))
