"""Reader for the detector's dataset directory format.

The format contract (manifest.json + little-endian float64 binaries with
complex values stored as interleaved re/im pairs, row-major):

    channels.bin      (T, Wp, M, N)  impulse-response taps
    symbols.bin       (T, N, W)      transmitted QAM blocks
    observations.bin  (T, M, W)      one-bit signs
    sigmas.bin        (T, 3)         [sigma_loaded, sigma_actual, snr_db]

This module deliberately re-implements the reader from the documented
format; the trainer talks to the detector package only through its files.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

FORMAT_NAME = "obit-dataset-v1"


@dataclass
class TrainingInstance:
    """One problem: per-subcarrier channel gains, truth, signs, noise level."""

    freq: np.ndarray  # (W, M, N) complex, circulant eigenvalues
    symbols: np.ndarray  # (N, W) complex
    q: np.ndarray  # (M, W) complex
    sigma: float
    snr_db: float


def _read_complex(path, shape):
    flat = np.fromfile(path, dtype="<f8")
    expect = int(np.prod(shape)) * 2
    if flat.size != expect:
        raise ValueError(f"{path}: expected {expect} floats, found {flat.size}")
    inter = flat.reshape(tuple(shape) + (2,))
    return inter[..., 0] + 1j * inter[..., 1]


def load_training_set(path):
    """Load a dataset directory; returns ``(manifest, [TrainingInstance])``.

    Channel taps are zero-padded to the OFDM size and transformed to the
    per-subcarrier gains the layers consume (unnormalized DFT: the circulant
    eigenvalue convention).
    """
    with open(os.path.join(path, "manifest.json"), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != FORMAT_NAME:
        raise ValueError(f"unrecognized dataset format {manifest.get('format')!r}")
    arrays = manifest["arrays"]

    def arr(name):
        spec = arrays[name]
        return _read_complex(os.path.join(path, spec["file"]), spec["shape"])

    taps = arr("channels")
    symbols = arr("symbols")
    obs = arr("observations")
    sig_spec = arrays["sigmas"]
    sigmas = np.fromfile(os.path.join(path, sig_spec["file"]), dtype="<f8").reshape(
        sig_spec["shape"]
    )
    if np.any(sigmas[:, 0] <= 0):
        raise ValueError("dataset contains non-positive noise levels")
    W = manifest["cfg"]["W"]
    instances = []
    for t in range(manifest["count"]):
        freq = np.fft.fft(taps[t], n=W, axis=0)
        instances.append(
            TrainingInstance(
                freq=freq,
                symbols=symbols[t],
                q=obs[t],
                sigma=float(sigmas[t, 0]),
                snr_db=float(sigmas[t, 2]),
            )
        )
    return manifest, instances
