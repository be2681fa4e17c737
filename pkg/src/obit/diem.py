"""Forward pass of the unfolded detector and its learned-parameter file.

Each of the K layers mirrors one inexact conditional-mean iteration with a
single gradient step, except that the proximal clip is replaced by a smooth
multilevel sigmoid that pulls estimates toward the constellation points.
Four scalars are untied per layer: the extrapolation coefficient ``alpha``,
a noise-scale offset ``beta``, the sigmoid sharpness ``gamma``, and the step
size ``eta``.  The conditional mean deliberately uses the plain iterate
while the gradient step starts from the extrapolated one; that asymmetry is
part of the architecture, not an accident.

Parameters are trained elsewhere; this module only loads, validates, and
runs them deterministically.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .fourier import FftCounter, unitary_fft
from .objective import conditional_mean
from .solvers import DetectionResult, SolverTrace, hard_decision

__all__ = [
    "DiemParams",
    "default_params",
    "multilevel_sigmoid",
    "diem_forward",
    "load_params",
    "save_params",
]

DEFAULT_LAYERS = 20


@dataclass(frozen=True)
class DiemParams:
    """Per-layer scalars of the K-layer unfolded detector."""

    D: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    eta: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "eta"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        k = len(self.alpha)
        for name in ("beta", "gamma", "eta"):
            if len(getattr(self, name)) != k:
                raise ValueError(f"parameter array {name!r} must have length {k}")
        for name in ("alpha", "beta", "gamma", "eta"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"parameter array {name!r} must be finite")
        if k and (self.gamma.min() <= 0 or self.eta.min() <= 0):
            raise ValueError("gamma and eta must be strictly positive")
        if self.D not in (1, 2, 4):
            raise ValueError(f"D must be one of 1, 2, 4, got {self.D}")

    @property
    def K(self):
        return len(self.alpha)


def default_params(inst, layers=DEFAULT_LAYERS, levels=None):
    """Untrained baseline: no extrapolation, no noise offset, gentle sigmoid
    (gamma = 2), and the common step 1/max_w sigma_max(H_w)^2.  Reduces to a
    damped one-step inexact conditional-mean iteration."""
    if levels is None:
        levels = inst.levels
    if levels is None:
        raise ValueError("constellation size unknown; pass levels=")
    eta = 1.0 / float(inst.sub_singulars[:, 0].max() ** 2)
    return DiemParams(
        D=int(levels),
        alpha=np.zeros(layers),
        beta=np.zeros(layers),
        gamma=np.full(layers, 2.0),
        eta=np.full(layers, eta),
        meta={"source": "default"},
    )


def multilevel_sigmoid(x, gamma, D):
    """Smooth multilevel decision map: the sum of 2D-1 unit sigmoids centered
    at 0, +-2, ..., +-2(D-1), each scaled to (-1, 1).  Odd, strictly
    increasing, bounded by 2D-1 in magnitude; approaches the hard decision
    map as gamma grows."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=float)
    centers = 2.0 * np.arange(-(D - 1), D)
    out = np.zeros_like(x)
    for mu in centers:
        out += np.tanh(0.5 * gamma * (x - mu))
    return out


def _omega_complex(x, gamma, D):
    return multilevel_sigmoid(x.real, gamma, D) + 1j * multilevel_sigmoid(x.imag, gamma, D)


def diem_forward(inst, params):
    """Run the K layers and take the hard decision.

    Pure function of (instance, params); exactly 2M length-W transforms per
    layer.  Raises if the parameter file was trained for a different
    constellation than the instance carries.
    """
    levels = inst.levels
    if levels is not None and levels != params.D:
        raise ValueError(
            f"parameters trained for D={params.D}, instance uses D={levels}"
        )
    N, W = inst.N, inst.W
    sigma = inst.sigma
    gram = inst.sub_gram
    freq_c = inst.ch.freq.conj()
    counter = FftCounter()
    t0 = time.perf_counter()

    s = np.zeros((N, W), dtype=complex)
    s_w = s.T.copy()  # (W, N)
    s_ex_w = s_w.copy()
    trace = SolverTrace()
    fft_seen = 0

    for k in range(params.K):
        r = conditional_mean(inst, s, counter, sigma_scale=sigma + params.beta[k])
        rt = unitary_fft(r, axis=1, counter=counter)
        rhs = np.einsum("wmn,wm->wn", freq_c, rt.T)
        g_w = np.einsum("wnk,wk->wn", gram, s_ex_w) - rhs
        s_new_w = _omega_complex(s_ex_w - params.eta[k] * g_w, params.gamma[k], params.D)
        s_ex_w = s_new_w + params.alpha[k] * (s_new_w - s_w)
        step = float(np.linalg.norm(s_new_w - s_w))
        s_w = s_new_w
        s = np.ascontiguousarray(s_w.T)
        trace.step_norm.append(step)
        trace.inner_iters.append(1)
        trace.certificate.append(0.0)
        trace.fft_count.append(counter.count - fft_seen)
        fft_seen = counter.count
        trace.wall_s.append(time.perf_counter() - t0)

    return DetectionResult(
        s_soft=s,
        s_hard=hard_decision(s, params.D),
        trace=trace,
        converged=True,
    )


def save_params(params, path):
    """Write the parameter file (JSON: K, D, the four arrays, and a meta
    block echoing the training configuration)."""
    payload = {
        "K": params.K,
        "D": params.D,
        "alpha": params.alpha.tolist(),
        "beta": params.beta.tolist(),
        "gamma": params.gamma.tolist(),
        "eta": params.eta.tolist(),
        "meta": params.meta,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)


def load_params(path):
    """Load and validate a parameter file; raises ValueError with a
    descriptive message on any schema violation."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"parameter file {path} is not valid JSON: {exc}") from exc
    missing = {"K", "D", "alpha", "beta", "gamma", "eta"} - raw.keys()
    if missing:
        raise ValueError(f"parameter file {path} lacks fields: {sorted(missing)}")
    try:
        params = DiemParams(
            D=int(raw["D"]),
            alpha=raw["alpha"],
            beta=raw["beta"],
            gamma=raw["gamma"],
            eta=raw["eta"],
            meta=raw.get("meta", {}),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"parameter file {path} is invalid: {exc}") from exc
    if params.K != int(raw["K"]):
        raise ValueError(
            f"parameter file {path}: declared K={raw['K']} but arrays have length {params.K}"
        )
    return params
