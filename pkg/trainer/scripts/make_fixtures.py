"""Regenerate the trainer's test fixtures from the detector package.

Development-time tool: it runs the detector implementation to freeze the
expected forward-pass outputs the parity test compares against, plus small
dataset directories.  The trainer package itself never imports the
detector; only this script does.

    python trainer/scripts/make_fixtures.py
"""

import json
import os
import sys

import numpy as np

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def write_complex(path, arr):
    inter = np.empty(arr.shape + (2,), dtype="<f8")
    inter[..., 0] = arr.real
    inter[..., 1] = arr.imag
    inter.tofile(path)


def main():
    from obit import SystemConfig, export_dataset, load_dataset
    from obit.diem import default_params, diem_forward, save_params
    from obit.model import OneBitObservation
    from obit.objective import Penalty, ProblemInstance

    os.makedirs(FIXTURES, exist_ok=True)

    # Parity set: 5 small instances plus the frozen forward outputs of the
    # detector's own unfolded pass under one fixed parameter file.
    parity_dir = os.path.join(FIXTURES, "parity")
    cfg = SystemConfig(M=8, N=2, W=16, Wp=4, D=2, J=4, snr_db=10.0, sigma0=1.0, seed=515)
    export_dataset(parity_dir, cfg, count=5, snr_range=(8.0, 12.0), margin_db=2.0)
    _, instances = load_dataset(parity_dir)

    def to_problem(di):
        ch = di.channel(cfg.W)
        obs = OneBitObservation(q=di.q, sigma=di.sigma, sigma_actual=di.sigma_actual)
        return ProblemInstance(obs, ch, Penalty.box_for(cfg.D), levels=cfg.D)

    params = default_params(to_problem(instances[0]), layers=20)
    # Perturb the defaults so the parity test exercises nonzero extrapolation,
    # noise offsets, and per-layer variation, not just the identity-ish case.
    rng = np.random.default_rng(99)
    params = type(params)(
        D=params.D,
        alpha=0.3 * rng.random(20),
        beta=0.2 * rng.random(20) - 0.1,
        gamma=params.gamma * (0.5 + rng.random(20)),
        eta=params.eta * (0.5 + rng.random(20)),
        meta={"source": "parity-fixture"},
    )
    save_params(params, os.path.join(FIXTURES, "parity_params.json"))

    outs = np.stack([diem_forward(to_problem(di), params).s_soft for di in instances])
    write_complex(os.path.join(FIXTURES, "parity_expected.bin"), outs)
    with open(os.path.join(FIXTURES, "parity_expected.json"), "w", encoding="utf-8") as fh:
        json.dump({"shape": list(outs.shape), "ordering": "row-major, re/im interleaved"}, fh)

    # Small training set for smoke tests and finite-difference checks.
    small_cfg = SystemConfig(M=8, N=2, W=16, Wp=4, D=2, J=4, snr_db=8.0, sigma0=1.0, seed=616)
    export_dataset(os.path.join(FIXTURES, "train_small"), small_cfg, count=8,
                   snr_range=(6.0, 10.0), margin_db=2.0)

    # Desk-scale set for the held-out BER comparison.
    desk_cfg = SystemConfig(M=32, N=4, W=64, Wp=16, D=2, J=4, snr_db=10.0, sigma0=3.0, seed=717)
    export_dataset(os.path.join(FIXTURES, "heldout"), desk_cfg, count=64,
                   snr_range=(10.0, 10.0), margin_db=3.0)

    print(f"fixtures written under {os.path.abspath(FIXTURES)}")


if __name__ == "__main__":
    sys.exit(main())
