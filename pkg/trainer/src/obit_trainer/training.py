"""Plain stochastic gradient descent through the unrolled forward pass.

One instance per step, summed squared-error loss against the true symbols.
The step sizes are trained as multipliers of their initialization: eta
lives at ~1e-3 scale while the other groups are O(1), and uniform-step SGD
on the raw parameterization blows eta out of the positive orthant on the
first step.  Gamma and eta are projected back to positive after every
update, and a non-finite loss aborts the run with the last good checkpoint.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np
import torch

from .network import LayerParams, prepare_instance, unrolled_forward

DEFAULT_LAYERS = 20
_POSITIVE_FLOOR = 1e-6


@dataclass
class TrainResult:
    """``params`` is the best checkpoint seen (by full-dataset loss), so
    ``final_loss`` never exceeds ``initial_loss`` even when a late stochastic
    epoch spikes; ``epoch_losses`` keeps the raw trajectory."""

    params: LayerParams
    epoch_losses: list = field(default_factory=list)
    best_loss: float = float("inf")
    diverged: bool = False

    @property
    def initial_loss(self):
        return self.epoch_losses[0]

    @property
    def final_loss(self):
        return self.best_loss


def default_init(instances, layers=DEFAULT_LAYERS, D=2):
    """The detector's documented untrained baseline, with the step size
    averaged over the training set (each instance's natural step is
    1/max_w sigma_max^2 of its own channel)."""
    etas = []
    for inst in instances:
        smax = np.linalg.svd(inst.freq, compute_uv=False)[:, 0].max()
        etas.append(1.0 / smax**2)
    eta = float(np.mean(etas))
    return LayerParams(
        D,
        np.zeros(layers),
        np.zeros(layers),
        np.full(layers, 2.0),
        np.full(layers, eta),
    )


class _LiveParams:
    """Graph-connected parameter view handed to the forward pass."""

    def __init__(self, D, alpha, beta, gamma, eta):
        self.D = D
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.eta = eta

    @property
    def K(self):
        return len(self.alpha)


class _TrainableParams:
    """Optimizer state: eta is carried as a multiplier of its initialization
    so a uniform step size treats all four groups comparably."""

    def __init__(self, init):
        self.D = init.D
        self.eta_base = init.eta.detach().clone()
        if (self.eta_base <= 0).any():
            raise ValueError("initial eta must be positive")
        as_leaf = lambda t: t.detach().clone().requires_grad_(True)  # noqa: E731
        self.alpha = as_leaf(init.alpha)
        self.beta = as_leaf(init.beta)
        self.gamma = as_leaf(init.gamma)
        self.eta_mult = torch.ones_like(self.eta_base).requires_grad_(True)

    def leaves(self):
        return [self.alpha, self.beta, self.gamma, self.eta_mult]

    def live_view(self):
        return _LiveParams(
            self.D, self.alpha, self.beta, self.gamma, self.eta_mult * self.eta_base
        )

    def project_positive(self):
        with torch.no_grad():
            self.gamma.clamp_(min=_POSITIVE_FLOOR)
            self.eta_mult.clamp_(min=_POSITIVE_FLOOR)

    def snapshot(self):
        return LayerParams(
            self.D, self.alpha, self.beta, self.gamma, self.eta_mult * self.eta_base
        )


def instance_loss(prep, params):
    """Raw squared error of the soft output against the true symbols."""
    out = unrolled_forward(prep, params)
    diff = out - prep["symbols"]
    return (diff.real**2 + diff.imag**2).sum()


def dataset_loss(preps, params):
    with torch.no_grad():
        return float(sum(instance_loss(p, params) for p in preps))


def train(instances, init, epochs=50, lr=1e-3, seed=0, progress=None):
    """SGD over the training set; returns a :class:`TrainResult` whose
    ``epoch_losses[0]`` is the pre-training loss and whose params are the
    best checkpoint seen (so final loss <= initial loss even when the last
    epoch is noisy)."""
    if not instances:
        raise ValueError("training set is empty")
    state = _TrainableParams(init)
    preps = [prepare_instance(i) for i in instances]
    opt = torch.optim.SGD(state.leaves(), lr=lr)
    rng = np.random.default_rng(seed)
    losses = [dataset_loss(preps, state.live_view())]
    best = state.snapshot()
    best_loss = losses[0]
    for _ in range(epochs):
        order = rng.permutation(len(preps))
        for idx in order:
            opt.zero_grad()
            loss = instance_loss(preps[idx], state.live_view())
            if not torch.isfinite(loss):
                return TrainResult(params=best, epoch_losses=losses,
                                   best_loss=best_loss, diverged=True)
            loss.backward()
            opt.step()
            state.project_positive()
        epoch_loss = dataset_loss(preps, state.live_view())
        if not np.isfinite(epoch_loss):
            return TrainResult(params=best, epoch_losses=losses,
                               best_loss=best_loss, diverged=True)
        losses.append(epoch_loss)
        if epoch_loss < best_loss:
            best_loss = epoch_loss
            best = state.snapshot()
        if progress is not None:
            progress(len(losses) - 1, epochs, epoch_loss)
    return TrainResult(params=best, epoch_losses=losses, best_loss=best_loss)


def save_params(params, path, meta=None):
    payload = params.to_json(meta=meta)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    os.replace(tmp, path)
    return payload
