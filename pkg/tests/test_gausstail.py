"""Gaussian tail-function numerics.

The pinned reference values below were produced ahead of time with mpmath at
60 decimal digits; the grid sweeps exercise the documented invariants
(positivity, the -z lower bound, 1-Lipschitz continuity, monotonicity).
"""

import mpmath as mp
import numpy as np
import pytest

from obit import gausstail

mp.mp.dps = 40


def _phi_ref(z):
    return mp.exp(-mp.mpf(z) ** 2 / 2) / mp.sqrt(2 * mp.pi)


def _cdf_ref(z):
    return mp.erfc(-mp.mpf(z) / mp.sqrt(2)) / 2


class TestLogCdf:
    def test_at_zero(self):
        assert gausstail.log_cdf(0.0) == pytest.approx(-0.6931471805599453, rel=1e-15)

    def test_far_right_tail(self):
        val = gausstail.log_cdf(40.0)
        assert val <= 0
        assert abs(val) < 1e-300

    def test_far_left_tail_pinned(self):
        # mpmath: log Phi(-40) = -804.60844201375378817
        assert gausstail.log_cdf(-40.0) == pytest.approx(-804.608442013754, rel=1e-12)

    def test_monotone_and_nonpositive(self):
        z = np.linspace(-60, 60, 5001)
        v = gausstail.log_cdf(z)
        assert np.all(np.isfinite(v))
        assert np.all(v <= 0)
        assert np.all(np.diff(v) >= 0)

    def test_matches_reference_cdf(self):
        z = np.linspace(-8, 8, 3203)
        err = np.abs(np.exp(gausstail.log_cdf(z)) - gausstail.cdf(z))
        assert err.max() <= 1e-14
        for zv in np.linspace(-8, 8, 33):
            ref = float(_cdf_ref(zv))
            assert abs(np.exp(gausstail.log_cdf(zv)) - ref) <= 1e-14

    def test_derivative_is_mills(self):
        z = np.linspace(-30, 30, 1201)
        h = 1e-5
        fd = (gausstail.log_cdf(z + h) - gausstail.log_cdf(z - h)) / (2 * h)
        rel = np.abs(fd - gausstail.mills(z)) / gausstail.mills(z)
        assert rel.max() <= 1e-6


class TestMills:
    def test_at_zero(self):
        assert gausstail.mills(0.0) == pytest.approx(np.sqrt(2 / np.pi), rel=1e-15)
        assert gausstail.mills(0.0) == pytest.approx(0.7978845608028654, rel=1e-15)

    def test_deep_right_tail(self):
        v = gausstail.mills(30.0)
        assert 0 < v < 1e-190

    def test_deep_left_tail_pinned(self):
        # mpmath: psi(-40) = 40.024968847207263723
        assert gausstail.mills(-40.0) == pytest.approx(40.02496884721, rel=1e-10)

    def test_grid_invariants(self):
        z = np.linspace(-200.0, 200.0, 1_000_000)
        v = gausstail.mills(z)
        assert np.all(np.isfinite(v))
        assert np.all(v > 0)
        assert np.all(v > np.maximum(0.0, -z) - 1e-12)
        dv = np.abs(np.diff(v))
        assert np.all(dv <= np.diff(z) + 1e-12)
        # strictly decreasing wherever the values are above underflow level
        live = v[:-1] > 1e-300
        assert np.all(np.diff(v)[live] <= 0)

    def test_asymptote_far_left(self):
        # psi(z) ~ -z + 1/(-z) for z -> -inf
        v = gausstail.mills(-200.0)
        assert np.isfinite(v)
        assert v == pytest.approx(200.005, rel=1e-6)
        assert v == pytest.approx(200.00499975003124, rel=1e-12)

    def test_matches_mpmath(self):
        zs = np.concatenate([np.linspace(-100, 8, 109), np.linspace(8, 37, 30)])
        for zv in zs:
            ref = float(_phi_ref(zv) / _cdf_ref(zv))
            assert gausstail.mills(float(zv)) == pytest.approx(ref, rel=1e-12)

    def test_vectorized_matches_scalar(self):
        z = np.array([-50.0, -3.0, 0.0, 2.0, 20.0])
        vec = gausstail.mills(z)
        scl = np.array([gausstail.mills(float(v)) for v in z])
        np.testing.assert_array_equal(vec, scl)


class TestErfcx:
    def test_against_mpmath(self):
        rng = np.random.default_rng(3)
        xs = np.concatenate([rng.uniform(-5, 30, 800), rng.uniform(30, 150, 200)])
        got = gausstail.erfcx(xs)
        for x, g in zip(xs, got):
            ref = float(mp.erfc(mp.mpf(x)) * mp.exp(mp.mpf(x) ** 2))
            assert g == pytest.approx(ref, rel=1e-13)


def test_pdf_values():
    assert gausstail.pdf(0.0) == pytest.approx(1 / np.sqrt(2 * np.pi), rel=1e-15)
    z = np.linspace(-10, 10, 101)
    np.testing.assert_allclose(
        gausstail.pdf(z), np.exp(-0.5 * z**2) / np.sqrt(2 * np.pi), rtol=1e-14
    )
