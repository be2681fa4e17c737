"""Differentiable re-implementation of the unfolded detector forward pass.

Numerically equal (<= 1e-6 relative) to the detector package's own forward
pass on the same inputs and parameters; that parity is a tested contract.
Everything runs in float64/complex128 so the parity margin is dominated by
operation order, not precision.
"""

import json

import numpy as np
import torch

_LOG_SQRT_2PI = 0.9189385332046727


def psi(z):
    """Inverse Mill's ratio phi/Phi through the log domain; stable for any
    finite argument and differentiable (the derivative of log_ndtr is psi
    itself, so gradients stay finite deep in the tail)."""
    return torch.exp(-0.5 * z * z - _LOG_SQRT_2PI - torch.special.log_ndtr(z))


class LayerParams:
    """The four per-layer scalar vectors (detached storage)."""

    def __init__(self, D, alpha, beta, gamma, eta):
        self.D = int(D)

        def as_t(v):
            if torch.is_tensor(v):
                v = v.detach().cpu().numpy()
            return torch.as_tensor(np.asarray(v, dtype=np.float64), dtype=torch.float64).clone()

        self.alpha = as_t(alpha)
        self.beta = as_t(beta)
        self.gamma = as_t(gamma)
        self.eta = as_t(eta)
        if not (len(self.alpha) == len(self.beta) == len(self.gamma) == len(self.eta)):
            raise ValueError("parameter vectors must share one length")

    @property
    def K(self):
        return len(self.alpha)

    def to_json(self, meta=None):
        return {
            "K": self.K,
            "D": self.D,
            "alpha": self.alpha.detach().tolist(),
            "beta": self.beta.detach().tolist(),
            "gamma": self.gamma.detach().tolist(),
            "eta": self.eta.detach().tolist(),
            "meta": meta or {},
        }

    @classmethod
    def from_json_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(raw["D"], raw["alpha"], raw["beta"], raw["gamma"], raw["eta"])


def multilevel_sigmoid(x, gamma, D):
    """Sum of 2D-1 scaled sigmoids centered on the even lattice; odd,
    bounded by 2D-1, approaches the hard decision map as gamma grows."""
    out = torch.zeros_like(x)
    for mu in range(-2 * (D - 1), 2 * D - 1, 2):
        out = out + torch.tanh(0.5 * gamma * (x - mu))
    return out


def _omega(x, gamma, D):
    return torch.complex(
        multilevel_sigmoid(x.real, gamma, D), multilevel_sigmoid(x.imag, gamma, D)
    )


def prepare_instance(inst):
    """Torch views of one training instance (complex128 throughout)."""
    freq = torch.as_tensor(inst.freq, dtype=torch.complex128)
    gram = torch.einsum("wmn,wmk->wnk", freq.conj(), freq)
    return {
        "freq": freq,
        "freq_c": freq.conj(),
        "gram": gram,
        "q_re": torch.as_tensor(inst.q.real, dtype=torch.float64),
        "q_im": torch.as_tensor(inst.q.imag, dtype=torch.float64),
        "sigma": float(inst.sigma),
        "symbols": torch.as_tensor(inst.symbols, dtype=torch.complex128),
    }


def unrolled_forward(prep, params):
    """Soft symbol estimate after the K layers (complex (N, W) tensor).

    Layer k: conditional-mean update from the plain iterate with noise scale
    sigma + beta_k, per-subcarrier re-encode, gradient step of size eta_k
    from the extrapolated iterate, multilevel sigmoid of sharpness gamma_k,
    extrapolation with alpha_k.
    """
    freq, freq_c, gram = prep["freq"], prep["freq_c"], prep["gram"]
    q_re, q_im, sigma = prep["q_re"], prep["q_im"], prep["sigma"]
    W, _, N = freq.shape
    s = torch.zeros((N, W), dtype=torch.complex128)
    s_w = s.T.clone()
    s_ex_w = s_w.clone()
    for k in range(params.K):
        ds = torch.einsum("wmn,nw->mw", freq, s)
        z = torch.fft.ifft(ds, dim=1, norm="ortho")
        a_re = q_re * z.real / sigma
        a_im = q_im * z.imag / sigma
        scale = sigma + params.beta[k]
        zeta = torch.complex(scale * (q_re * psi(a_re)), scale * (q_im * psi(a_im)))
        rt = torch.fft.fft(z + zeta, dim=1, norm="ortho")
        rhs = torch.einsum("wmn,wm->wn", freq_c, rt.T)
        g_w = torch.einsum("wnk,wk->wn", gram, s_ex_w) - rhs
        s_new_w = _omega(s_ex_w - params.eta[k] * g_w, params.gamma[k], params.D)
        s_ex_w = s_new_w + params.alpha[k] * (s_new_w - s_w)
        s_w = s_new_w
        s = s_w.T
    return s


def hard_decision(s_soft, D):
    """Nearest odd level per real dimension, clipped, ties toward zero."""

    def decide(x):
        mag = np.abs(x)
        idx = np.clip(np.ceil((mag - 2.0) / 2.0), 0, D - 1)
        lvl = 2.0 * idx + 1.0
        return np.where(x >= 0, lvl, -lvl)

    return decide(s_soft.real) + 1j * decide(s_soft.imag)
