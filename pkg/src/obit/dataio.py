"""Dataset directory format shared with the parameter trainer.

A dataset is a directory with ``manifest.json`` plus four raw little-endian
float64 files, row-major with complex values stored as interleaved
real/imaginary pairs:

    channels.bin      (T, Wp, M, N) complex   impulse-response taps
    symbols.bin       (T, N, W)     complex   transmitted QAM blocks
    observations.bin  (T, M, W)     complex   one-bit signs (+-1 +- j)
    sigmas.bin        (T, 3)        real      [sigma_loaded, sigma_actual, snr_db]

Instance t is drawn from substream ``(seed, t)`` at an SNR sampled uniformly
from the configured range widened by a training margin, so a trained network
sees slightly more spread than the evaluation sweep.
"""

import dataclasses
import json
import os
from dataclasses import dataclass

import numpy as np

from .model import (
    MultipathChannel,
    OneBitObservation,
    draw_symbols,
    generate_channel,
    quantize_one_bit,
    snr_to_sigma,
    transmit,
    trial_rng,
)

__all__ = ["DatasetInstance", "export_dataset", "load_dataset", "FORMAT_NAME"]

FORMAT_NAME = "obit-dataset-v1"
_DATA_SALT = 101


@dataclass
class DatasetInstance:
    """One stored problem: channel taps, true symbols, signs, noise levels."""

    taps: np.ndarray  # (Wp, M, N) complex
    symbols: np.ndarray  # (N, W) complex
    q: np.ndarray  # (M, W) complex
    sigma: float
    sigma_actual: float
    snr_db: float

    def channel(self, size):
        return MultipathChannel.from_taps(self.taps, size)

    def observation(self):
        return OneBitObservation(q=self.q, sigma=self.sigma, sigma_actual=self.sigma_actual)


def _write_complex(path, arr):
    inter = np.empty(arr.shape + (2,), dtype="<f8")
    inter[..., 0] = arr.real
    inter[..., 1] = arr.imag
    inter.tofile(path)


def _read_complex(path, shape):
    flat = np.fromfile(path, dtype="<f8")
    expect = int(np.prod(shape)) * 2
    if flat.size != expect:
        raise ValueError(f"{path}: expected {expect} floats, found {flat.size}")
    inter = flat.reshape(tuple(shape) + (2,))
    return inter[..., 0] + 1j * inter[..., 1]


def export_dataset(out_dir, cfg, count, snr_range=None, margin_db=3.0, seed=None):
    """Generate ``count`` instances into ``out_dir``; returns the manifest.

    ``snr_range`` defaults to the config's single operating point; the range
    actually sampled is widened by ``margin_db`` on both ends.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if seed is None:
        seed = cfg.seed
    if snr_range is None:
        snr_range = (cfg.snr_db, cfg.snr_db)
    lo, hi = float(min(snr_range)), float(max(snr_range))
    lo_used, hi_used = lo - margin_db, hi + margin_db

    os.makedirs(out_dir, exist_ok=True)
    taps = np.empty((count, cfg.Wp, cfg.M, cfg.N), dtype=complex)
    syms = np.empty((count, cfg.N, cfg.W), dtype=complex)
    obs = np.empty((count, cfg.M, cfg.W), dtype=complex)
    sigmas = np.empty((count, 3), dtype="<f8")
    for t in range(count):
        rng = trial_rng(seed, t, salt=_DATA_SALT)
        snr_db = float(rng.uniform(lo_used, hi_used))
        cfg_t = dataclasses.replace(cfg, snr_db=snr_db)
        ch = generate_channel(cfg_t, rng)
        sym = draw_symbols(cfg_t, rng)
        sigma_actual, sigma_loaded = snr_to_sigma(cfg_t)
        r = transmit(ch, sym, sigma_actual, rng)
        q = quantize_one_bit(r, sigma_loaded, sigma_actual)
        taps[t] = ch.taps
        syms[t] = sym.s
        obs[t] = q.q
        sigmas[t] = (sigma_loaded, sigma_actual, snr_db)

    _write_complex(os.path.join(out_dir, "channels.bin"), taps)
    _write_complex(os.path.join(out_dir, "symbols.bin"), syms)
    _write_complex(os.path.join(out_dir, "observations.bin"), obs)
    sigmas.tofile(os.path.join(out_dir, "sigmas.bin"))

    manifest = {
        "format": FORMAT_NAME,
        "count": count,
        "cfg": dataclasses.asdict(cfg),
        "seed": seed,
        "snr_range_db": [lo, hi],
        "snr_margin_db": margin_db,
        "snr_range_with_margin_db": [lo_used, hi_used],
        "dtype": "f64",
        "endianness": "little",
        "ordering": "row-major, re/im interleaved",
        "arrays": {
            "channels": {"file": "channels.bin", "shape": [count, cfg.Wp, cfg.M, cfg.N], "complex": True},
            "symbols": {"file": "symbols.bin", "shape": [count, cfg.N, cfg.W], "complex": True},
            "observations": {"file": "observations.bin", "shape": [count, cfg.M, cfg.W], "complex": True},
            "sigmas": {
                "file": "sigmas.bin",
                "shape": [count, 3],
                "complex": False,
                "columns": ["sigma_loaded", "sigma_actual", "snr_db"],
            },
        },
    }
    tmp = os.path.join(out_dir, "manifest.json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    os.replace(tmp, os.path.join(out_dir, "manifest.json"))
    return manifest


def load_dataset(path):
    """Read a dataset directory back into instances; returns
    ``(manifest, [DatasetInstance, ...])`` and validates shapes."""
    with open(os.path.join(path, "manifest.json"), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != FORMAT_NAME:
        raise ValueError(f"unrecognized dataset format {manifest.get('format')!r}")
    arrays = manifest["arrays"]
    taps = _read_complex(os.path.join(path, arrays["channels"]["file"]), arrays["channels"]["shape"])
    syms = _read_complex(os.path.join(path, arrays["symbols"]["file"]), arrays["symbols"]["shape"])
    obs = _read_complex(
        os.path.join(path, arrays["observations"]["file"]), arrays["observations"]["shape"]
    )
    sig = np.fromfile(os.path.join(path, arrays["sigmas"]["file"]), dtype="<f8").reshape(
        arrays["sigmas"]["shape"]
    )
    instances = [
        DatasetInstance(
            taps=taps[t],
            symbols=syms[t],
            q=obs[t],
            sigma=float(sig[t, 0]),
            sigma_actual=float(sig[t, 1]),
            snr_db=float(sig[t, 2]),
        )
        for t in range(manifest["count"])
    ]
    return manifest, instances
