"""Dataset directory round trips."""

import numpy as np
import pytest

from obit import SystemConfig, export_dataset, load_dataset
from obit.model import snr_to_sigma


def test_roundtrip(tmp_path):
    cfg = SystemConfig(M=4, N=2, W=8, Wp=3, D=2, snr_db=6.0, sigma0=1.0, seed=12)
    out = tmp_path / "ds"
    manifest = export_dataset(out, cfg, count=4, snr_range=(4.0, 8.0), margin_db=2.0)
    loaded_manifest, instances = load_dataset(out)
    assert loaded_manifest["count"] == 4
    assert len(instances) == 4
    assert instances[0].taps.shape == (3, 4, 2)
    assert instances[0].symbols.shape == (2, 8)
    assert instances[0].q.shape == (4, 8)
    # signs are really signs
    assert np.all(np.abs(instances[0].q.real) == 1)
    # channel view rebuilds
    ch = instances[0].channel(cfg.W)
    assert ch.freq.shape == (8, 4, 2)
    assert manifest["snr_range_with_margin_db"] == [2.0, 10.0]


def test_margin_echo_and_range(tmp_path):
    cfg = SystemConfig(M=2, N=2, W=8, Wp=2, seed=1)
    manifest = export_dataset(tmp_path / "ds", cfg, count=16, snr_range=(0.0, 5.0), margin_db=3.0)
    assert manifest["snr_range_db"] == [0.0, 5.0]
    assert manifest["snr_margin_db"] == 3.0
    assert manifest["snr_range_with_margin_db"] == [-3.0, 8.0]
    _, instances = load_dataset(tmp_path / "ds")
    snrs = [i.snr_db for i in instances]
    assert min(snrs) >= -3.0 and max(snrs) <= 8.0
    assert max(snrs) - min(snrs) > 1.0  # actually spread out


def test_deterministic(tmp_path):
    cfg = SystemConfig(M=2, N=2, W=8, Wp=2, seed=77)
    export_dataset(tmp_path / "a", cfg, count=3)
    export_dataset(tmp_path / "b", cfg, count=3)
    _, xs = load_dataset(tmp_path / "a")
    _, ys = load_dataset(tmp_path / "b")
    for x, y in zip(xs, ys):
        np.testing.assert_array_equal(x.taps, y.taps)
        np.testing.assert_array_equal(x.symbols, y.symbols)
        np.testing.assert_array_equal(x.q, y.q)
        assert x.sigma == y.sigma


def test_sigma_consistency(tmp_path):
    import dataclasses

    cfg = SystemConfig(M=2, N=2, W=8, Wp=2, sigma0=2.5, seed=5)
    export_dataset(tmp_path / "ds", cfg, count=5, snr_range=(3.0, 3.0), margin_db=0.0)
    _, instances = load_dataset(tmp_path / "ds")
    for inst in instances:
        expect_actual, expect_loaded = snr_to_sigma(dataclasses.replace(cfg, snr_db=inst.snr_db))
        assert inst.sigma_actual == pytest.approx(expect_actual, rel=1e-12)
        assert inst.sigma == pytest.approx(expect_loaded, rel=1e-12)


def test_validation(tmp_path):
    cfg = SystemConfig(M=2, N=2, W=8, Wp=2)
    with pytest.raises(ValueError):
        export_dataset(tmp_path / "ds", cfg, count=0)
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "missing")
