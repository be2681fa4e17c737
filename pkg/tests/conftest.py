import numpy as np
import pytest

from obit import Penalty, SystemConfig
from obit.harness import build_problem


@pytest.fixture
def small_cfg():
    """Largest instance the dense oracles are allowed to materialize."""
    return SystemConfig(M=4, N=2, W=8, Wp=4, D=2, J=2, snr_db=5.0, sigma0=0.0, seed=7)


def make_problem(cfg, kind="gmap", trial=0):
    """(instance, true symbol block) for one deterministic trial."""
    penalty = Penalty.gmap_for(cfg.D) if kind == "gmap" else Penalty.box_for(cfg.D)
    return build_problem(cfg, trial, penalty)


@pytest.fixture
def gmap_problem(small_cfg):
    return make_problem(small_cfg, "gmap")


@pytest.fixture
def box_problem(small_cfg):
    return make_problem(small_cfg, "box")


def random_symbols(rng, N, W, scale=3.0):
    return scale * (rng.standard_normal((N, W)) + 1j * rng.standard_normal((N, W)))


