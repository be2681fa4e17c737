"""Numerically stable standard-Gaussian tail functions.

Everything the one-bit likelihood machinery needs: the pdf ``phi``, the cdf
``Phi``, ``log Phi``, and the inverse Mill's ratio ``psi(z) = phi(z)/Phi(z)``
(the Gaussian hazard function).  The naive ``phi/Phi`` quotient underflows
near ``z = -38``, which happens routinely at high SNR, so the deep left tail
is evaluated through the scaled complementary error function:

    psi(z)     = sqrt(2/pi) / erfcx(-z/sqrt(2))
    log Phi(z) = -z^2/2 + log(erfcx(-z/sqrt(2)) / 2)

All functions are elementwise over arrays, total on finite inputs, and pure.
"""

import numpy as np
from scipy import special as _sp

__all__ = ["pdf", "cdf", "log_cdf", "mills", "erfcx"]

_SQRT2 = np.sqrt(2.0)
_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
# Smallest positive double; psi underflows past z ~ +38 but is strictly
# positive mathematically, so clamp instead of returning 0.
_TINY = np.nextafter(0.0, 1.0)
# Left of this the direct phi/Phi quotient starts losing accuracy.
_TAIL_SPLIT = -5.0


def erfcx(x):
    """Scaled complementary error function ``exp(x^2) * erfc(x)``."""
    return _sp.erfcx(x)


def pdf(z):
    """Standard normal density ``phi(z)``."""
    z = np.asarray(z, dtype=np.float64)
    return np.exp(-0.5 * z * z) * _INV_SQRT_2PI


def cdf(z):
    """Standard normal distribution function ``Phi(z)``."""
    return _sp.ndtr(np.asarray(z, dtype=np.float64))


def log_cdf(z):
    """``log Phi(z)``, accurate far into the left tail (no underflow)."""
    return _sp.log_ndtr(np.asarray(z, dtype=np.float64))


def mills(z):
    """Inverse Mill's ratio ``psi(z) = phi(z)/Phi(z)``.

    Strictly positive, strictly decreasing, 1-Lipschitz, and bounded below
    by ``max(0, -z)``.  For ``z -> -inf`` it behaves as ``-z + 1/(-z)``.
    Outputs that underflow the double range (z beyond ~ +38) are clamped to
    the smallest positive double so the strict-positivity contract holds.
    """
    z = np.asarray(z, dtype=np.float64)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    tail = z < _TAIL_SPLIT
    if tail.any():
        out[tail] = _SQRT_2_OVER_PI / _sp.erfcx(-z[tail] / _SQRT2)
    head = ~tail
    if head.any():
        zh = z[head]
        out[head] = np.exp(-0.5 * zh * zh) * _INV_SQRT_2PI / _sp.ndtr(zh)
    np.maximum(out, _TINY, out=out)
    return out[0] if scalar else out
