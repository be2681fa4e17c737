"""Penalized one-bit likelihood objective and its FFT-structured gradient.

The detectors minimize ``F = f + h`` over the stacked real/imaginary symbol
vector, where

    f(theta) = - sum_i log Phi(b_i^T theta),      B = Diag(y) A / sigma,

``A`` is the real embedding of the block channel operator and ``y`` the
observed signs.  ``B`` is never materialized in the production path: every
application goes through per-subcarrier multiplies plus one FFT/IFFT pair
per antenna (2M length-W transforms per gradient).  All arithmetic stays
complex; the real embedding exists only in the small dense oracles used for
verification (:func:`dense_real_model`).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gausstail
from .fourier import unitary_fft, unitary_ifft

__all__ = [
    "Penalty",
    "ProblemInstance",
    "SpectralInfo",
    "eval_f",
    "grad_f",
    "value_and_grad",
    "conditional_mean",
    "surrogate_gap",
    "spectral_info",
    "b_norm_sq",
    "dense_block_channel",
    "dense_real_model",
]


@dataclass(frozen=True)
class Penalty:
    """Separable regularizer h: ridge ("gmap") or box indicator ("box").

    gmap: h(theta) = lam/2 ||theta||^2 with the matched prior lam = 3/((2D)^2-1).
    box:  h(theta) = indicator of [-radius, radius] per real dimension,
          radius = 2D - 1.
    """

    kind: str
    lam: float = 0.0
    radius: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gmap", "box"):
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.kind == "gmap" and self.lam <= 0:
            raise ValueError("gmap penalty needs lam > 0")
        if self.kind == "box" and self.radius <= 0:
            raise ValueError("box penalty needs radius > 0")

    @classmethod
    def gmap_for(cls, D, lam=None):
        if lam is None:
            lam = 3.0 / ((2 * D) ** 2 - 1)
        return cls(kind="gmap", lam=float(lam))

    @classmethod
    def box_for(cls, D, radius=None):
        if radius is None:
            radius = 2 * D - 1
        return cls(kind="box", radius=float(radius))

    @property
    def is_box(self):
        return self.kind == "box"

    def value(self, s):
        """h at a complex symbol array (0 for a feasible box point)."""
        if self.kind == "gmap":
            return 0.5 * self.lam * float(np.sum(np.abs(s) ** 2))
        return 0.0

    def feasible(self, s, tol=0.0):
        """True where h is finite (always, for gmap)."""
        if self.kind == "gmap":
            return True
        u = self.radius + tol
        return bool(np.max(np.abs(s.real)) <= u and np.max(np.abs(s.imag)) <= u)

    def prox(self, x, t):
        """prox_{t h}(x), elementwise on Re/Im; ``t`` may broadcast."""
        if self.kind == "gmap":
            return x / (1.0 + np.asarray(t) * self.lam)
        u = self.radius
        return np.clip(x.real, -u, u) + 1j * np.clip(x.imag, -u, u)

    def cert_residual_sq(self, gt, x):
        """Squared distance from ``-gt`` to the subdifferential of h at x,
        summed over the trailing axis (per-subcarrier batches in, squared
        certificates out)."""
        if self.kind == "gmap":
            r = gt + self.lam * x
            return np.sum(np.abs(r) ** 2, axis=-1)
        u = self.radius
        return np.sum(
            box_chi_sq(gt.real, x.real, u) + box_chi_sq(gt.imag, x.imag, u), axis=-1
        )


def box_chi_sq(g, x, radius):
    """Squared components of the box subgradient-distance map: |g|^2 unless
    the constraint is active and g points outward, in which case 0."""
    absorbed = ((x >= radius) & (g < 0)) | ((x <= -radius) & (g > 0))
    return np.where(absorbed, 0.0, g * g)


class ProblemInstance:
    """One detection problem: observation, channel, penalty, and (optionally)
    the constellation half-level count used for hard decisions; when omitted
    it is inferred from the penalty's default parameterization."""

    def __init__(self, obs, ch, penalty, levels=None):
        self.obs = obs
        self.ch = ch
        self.penalty = penalty
        self.levels = levels
        M, W = obs.q.shape
        if ch.freq.shape[0] != W or ch.freq.shape[1] != M:
            raise ValueError("observation and channel shapes disagree")

    @property
    def M(self):
        return self.obs.q.shape[0]

    @property
    def N(self):
        return self.ch.freq.shape[2]

    @property
    def W(self):
        return self.obs.q.shape[1]

    @property
    def sigma(self):
        return self.obs.sigma

    @cached_property
    def sub_gram(self):
        """(W, N, N) stack of H_w^H H_w."""
        return np.einsum("wmn,wmk->wnk", self.ch.freq.conj(), self.ch.freq)

    @cached_property
    def sub_singulars(self):
        """(W, min(M, N)) singular values of each subcarrier matrix,
        descending."""
        return np.linalg.svd(self.ch.freq, compute_uv=False)


@dataclass(frozen=True)
class SpectralInfo:
    """Spectral constants of B derived per subcarrier."""

    sigma_max_B: float
    sigma_min_B: float
    per_subcarrier: np.ndarray  # (W, 2): [sigma_max(H_w), sigma_min(H_w)]

    @property
    def L_f(self):
        """Gradient Lipschitz constant sigma_max(B)^2."""
        return self.sigma_max_B**2


def spectral_info(inst):
    """Exact per-subcarrier SVDs; sigma_max(B) = max_w sigma_max(H_w)/sigma
    and likewise with min (the unitary similarity makes the block operator's
    spectrum the union of the subcarrier spectra)."""
    sv = inst.sub_singulars
    per = np.stack([sv[:, 0], sv[:, -1]], axis=1)
    return SpectralInfo(
        sigma_max_B=float(sv[:, 0].max() / inst.sigma),
        sigma_min_B=float(sv[:, -1].min() / inst.sigma),
        per_subcarrier=per,
    )


def _reconstruct(ch, s, counter=None):
    """Noiseless receive block z[m, w] for symbols s[n, w] (M IFFTs)."""
    ds = np.einsum("wmn,nw->mw", ch.freq, s)
    return unitary_ifft(ds, axis=1, counter=counter)


def _sign_args(q, z, sigma):
    """Arguments of Phi in the likelihood: (y * x / sigma) per Re/Im lane."""
    return q.real * z.real / sigma, q.imag * z.imag / sigma


def eval_f(inst, s, counter=None):
    """Negative log-likelihood f at symbol array s (M IFFTs)."""
    z = _reconstruct(inst.ch, s, counter)
    a_re, a_im = _sign_args(inst.obs.q, z, inst.sigma)
    return -float(gausstail.log_cdf(a_re).sum() + gausstail.log_cdf(a_im).sum())


def grad_f(inst, s, counter=None):
    """Gradient of f with respect to s (as grad_Re + j grad_Im), via the
    per-subcarrier pipeline: 2M length-W transforms total."""
    z = _reconstruct(inst.ch, s, counter)
    return _grad_from_reconstruction(inst, z, counter)


def _grad_from_reconstruction(inst, z, counter):
    q, sigma = inst.obs.q, inst.sigma
    a_re, a_im = _sign_args(q, z, sigma)
    zeta = (q.real * gausstail.mills(a_re) + 1j * (q.imag * gausstail.mills(a_im))) / sigma
    fz = unitary_fft(zeta, axis=1, counter=counter)
    return -np.einsum("wmn,mw->nw", inst.ch.freq.conj(), fz)


def value_and_grad(inst, s, counter=None):
    """f and its gradient in one pass, sharing the reconstruction (2M
    transforms for the pair instead of 3M)."""
    z = _reconstruct(inst.ch, s, counter)
    q, sigma = inst.obs.q, inst.sigma
    a_re, a_im = _sign_args(q, z, sigma)
    val = -float(gausstail.log_cdf(a_re).sum() + gausstail.log_cdf(a_im).sum())
    zeta = (q.real * gausstail.mills(a_re) + 1j * (q.imag * gausstail.mills(a_im))) / sigma
    fz = unitary_fft(zeta, axis=1, counter=counter)
    return val, -np.einsum("wmn,mw->nw", inst.ch.freq.conj(), fz)


def conditional_mean(inst, s, counter=None, sigma_scale=None):
    """Posterior mean of the unquantized receive block given the signs and
    the current symbol estimate (the truncated-Gaussian mean, elementwise).

    ``sigma_scale`` overrides the multiplier in front of the correction term
    (the unfolded network perturbs it); the argument of psi always uses the
    instance sigma.
    """
    q, sigma = inst.obs.q, inst.sigma
    scale = sigma if sigma_scale is None else sigma_scale
    z = _reconstruct(inst.ch, s, counter)
    a_re, a_im = _sign_args(q, z, sigma)
    zeta = scale * (q.real * gausstail.mills(a_re) + 1j * (q.imag * gausstail.mills(a_im)))
    return z + zeta


def b_norm_sq(inst, ds):
    """||B (theta - theta')||^2 for a complex symbol difference ``ds``,
    evaluated per subcarrier (no transforms needed)."""
    dz = np.einsum("wmn,nw->mw", inst.ch.freq, ds)
    return float(np.sum(np.abs(dz) ** 2)) / inst.sigma**2


def surrogate_gap(inst, s, s_prev, counter=None):
    """Majorization slack g(theta | theta') - f(theta) of the conditional-mean
    surrogate: zero at s = s_prev, nonnegative everywhere."""
    f_prev, g_prev = value_and_grad(inst, s_prev, counter)
    ds = s - s_prev
    lin = float(np.vdot(g_prev, ds).real)
    quad = 0.5 * b_norm_sq(inst, ds)
    return f_prev + lin + quad - eval_f(inst, s, counter)


# ---------------------------------------------------------------------------
# Dense oracles.  Only valid for tiny instances; the production solvers never
# touch these.  The bound checker materializes B here to evaluate spectral
# quantities that have no streaming form.

_DENSE_ROW_CAP = 2048


def dense_block_channel(ch, size):
    """Materialize the MW x NW block operator with blocks H_{m,n} F^H."""
    W = size
    _, M, N = ch.taps.shape
    if M * W > _DENSE_ROW_CAP:
        raise ValueError("instance too large to materialize densely")
    from scipy.linalg import circulant

    F = unitary_fft(np.eye(W), axis=0)
    out = np.zeros((M * W, N * W), dtype=complex)
    for m in range(M):
        for n in range(N):
            col = np.zeros(W, dtype=complex)
            col[: ch.taps.shape[0]] = ch.taps[:, m, n]
            out[m * W : (m + 1) * W, n * W : (n + 1) * W] = circulant(col) @ F.conj().T
    return out


def dense_real_model(inst):
    """Real embedding (A, B, y) of a small instance: theta = (Re s, Im s)
    stacked user-major, observation rows antenna-major, Re block before Im."""
    H = dense_block_channel(inst.ch, inst.W)
    A = np.block([[H.real, -H.imag], [H.imag, H.real]])
    y = np.concatenate([inst.obs.q.real.ravel(), inst.obs.q.imag.ravel()])
    B = (y[:, None] * A) / inst.sigma
    return A, B, y


def theta_of(s):
    """Real embedding of a complex symbol array (stacked Re then Im)."""
    return np.concatenate([s.real.ravel(), s.imag.ravel()])


def s_of_theta(theta, N, W):
    """Inverse of :func:`theta_of`."""
    half = N * W
    return theta[:half].reshape(N, W) + 1j * theta[half:].reshape(N, W)
