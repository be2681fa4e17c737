"""Unitary DFT helpers and a transform counter.

The whole library works in the unitary convention (forward and inverse both
carry ``1/sqrt(W)``), so Parseval holds without bookkeeping.  The circulant
channel matrices built from an impulse response ``h`` have eigenvalues equal
to the *unnormalized* DFT of ``h`` — that scaling lives in
:func:`circulant_eigenvalues` and nowhere else.

Per-iteration transform counts are part of the performance contract, so the
wrappers optionally tally how many length-W transforms they performed.
"""

import numpy as np

__all__ = ["FftCounter", "unitary_fft", "unitary_ifft", "circulant_eigenvalues"]


class FftCounter:
    """Tallies length-W transforms; a batched call counts once per column."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def add(self, n):
        self.count += int(n)


def _num_transforms(x, axis):
    return x.size // x.shape[axis] if x.size else 0


def unitary_fft(x, axis=-1, counter=None):
    """Forward unitary DFT along ``axis``."""
    if counter is not None:
        counter.add(_num_transforms(x, axis))
    return np.fft.fft(x, axis=axis, norm="ortho")


def unitary_ifft(x, axis=-1, counter=None):
    """Inverse unitary DFT along ``axis``."""
    if counter is not None:
        counter.add(_num_transforms(x, axis))
    return np.fft.ifft(x, axis=axis, norm="ortho")


def circulant_eigenvalues(taps, size, axis=0):
    """Eigenvalues of the circulant matrix whose first column is ``taps``
    zero-padded to ``size``: the unnormalized DFT of the padded taps
    (equivalently ``sqrt(size)`` times the unitary DFT)."""
    return np.fft.fft(taps, n=size, axis=axis)
