"""Detector family: zero-forcing, box proximal gradient, and the EM variants.

``detect_em`` covers four detectors through its options:

    ridge penalty, no extrapolation      (standard EM, closed-form M-step)
    ridge penalty, extrapolation         (accelerated EM)
    box penalty, fixed tight tolerance   (box EM, inner APG M-step)
    box penalty, decaying tolerance      (accelerated inexact EM)

Every outer iteration runs the conditional-mean update (2M length-W
transforms), re-encodes per subcarrier, and solves the W decoupled
penalized least-squares problems.  Inexact M-steps are certified by the
subgradient-distance residual accumulated *globally* across subcarriers:
subcarriers already below their share keep iterating until the summed
certificate passes, in lockstep.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .fourier import FftCounter, unitary_fft
from .model import SymbolBlock
from .objective import (
    box_chi_sq,
    conditional_mean,
    eval_f,
    spectral_info,
    value_and_grad,
)

__all__ = [
    "FixedEps",
    "PowerLawEps",
    "SolverOptions",
    "SolverTrace",
    "DetectionResult",
    "fista_coefficients",
    "hard_decision",
    "box_certificate",
    "inner_apg",
    "detect_zf",
    "detect_pg_box",
    "detect_em",
]


@dataclass(frozen=True)
class FixedEps:
    """Constant M-step tolerance eps_k = value."""

    value: float

    def at(self, k):
        return self.value


@dataclass(frozen=True)
class PowerLawEps:
    """Decaying M-step tolerance eps_k = c * k**(-p)."""

    c: float
    p: float

    def at(self, k):
        return self.c * float(k) ** (-self.p)


@dataclass(frozen=True)
class SolverOptions:
    """Knobs shared by the iterative detectors.

    ``eps_schedule`` only matters for box M-steps.  With extrapolation on,
    a power-law schedule must decay faster than k^-2 for the accelerated
    inexact rate to hold; without, faster than k^-1.
    """

    accel: bool = True
    eps_schedule: object = None
    stop_rel: float = 5e-4
    max_outer: int = 1000
    max_inner: int = 500
    step_size_override: float = None
    record_objective: bool = False
    record_iterates: bool = False

    def __post_init__(self):
        if isinstance(self.eps_schedule, PowerLawEps):
            need = 2.0 if self.accel else 1.0
            if self.eps_schedule.p <= need:
                raise ValueError(
                    f"power-law exponent must exceed {need} "
                    f"({'with' if self.accel else 'without'} extrapolation)"
                )
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be positive")


@dataclass
class SolverTrace:
    """Per-outer-iteration record.

    ``objective`` (when recorded) holds F at theta^0 .. theta^K, one entry
    longer than the per-update arrays; the rest have one entry per update.
    """

    objective: list = field(default_factory=list)
    step_norm: list = field(default_factory=list)
    inner_iters: list = field(default_factory=list)
    certificate: list = field(default_factory=list)
    fft_count: list = field(default_factory=list)
    wall_s: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    inner_cap_hits: int = 0

    @property
    def outer_iters(self):
        return len(self.step_norm)

    @property
    def total_inner(self):
        return int(sum(self.inner_iters))

    @property
    def total_fft(self):
        return int(sum(self.fft_count))


@dataclass
class DetectionResult:
    s_soft: np.ndarray  # (N, W) complex
    s_hard: SymbolBlock
    trace: SolverTrace
    converged: bool


def _fista_step(t):
    """One step of the extrapolation recurrence: returns (t_next, alpha_next)
    with alpha_next = (t - 1)/t_next."""
    t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
    return t_next, (t - 1.0) / t_next


def fista_coefficients(k):
    """(t_k, alpha_k) of the extrapolation sequence; t_0 = 1, alpha_0 = 0."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    t, alpha = 1.0, 0.0
    for _ in range(k):
        t, alpha = _fista_step(t)
    return t, alpha


def hard_decision(s_soft, D):
    """Nearest-constellation decision, per real dimension: closest odd
    integer clipped to [-(2D-1), 2D-1]; exact ties go to the smaller
    magnitude, and the sign of zero is +."""

    def decide(x):
        mag = np.abs(x)
        idx = np.clip(np.ceil((mag - 2.0) / 2.0), 0, D - 1)
        level = 2.0 * idx + 1.0
        return np.where(x >= 0, level, -level)

    return SymbolBlock(s=decide(s_soft.real) + 1j * decide(s_soft.imag))


def box_certificate(grad, point, radius):
    """Distance from zero to the box M-step subdifferential at ``point``
    (real arrays, elementwise case analysis)."""
    return float(np.sqrt(np.sum(box_chi_sq(np.asarray(grad), np.asarray(point), radius))))


def _stop(step, prev_norm, stop_rel):
    # A zero-norm previous iterate defers the relative test one iteration.
    return prev_norm > 0 and step <= stop_rel * prev_norm


def detect_zf(inst):
    """Per-subcarrier pseudo-inverse applied to the DFT bins of the signs.

    Rank-deficient subcarriers fall back to a truncated pseudo-inverse
    (relative singular-value cutoff 1e-10).
    """
    counter = FftCounter()
    t0 = time.perf_counter()
    qt = unitary_fft(inst.obs.q, axis=1, counter=counter)
    pinv = np.linalg.pinv(inst.ch.freq, rcond=1e-10)  # (W, N, M)
    s_w = np.einsum("wnm,wm->wn", pinv, qt.T)
    s_soft = np.ascontiguousarray(s_w.T)
    trace = SolverTrace(fft_count=[counter.count], wall_s=[time.perf_counter() - t0])
    return DetectionResult(
        s_soft=s_soft,
        s_hard=hard_decision(s_soft, _infer_levels(inst)),
        trace=trace,
        converged=True,
    )


def _infer_levels(inst):
    """Half-level count D for hard decisions: the instance's explicit value,
    else inferred from the penalty's default parameterization."""
    if inst.levels is not None:
        return inst.levels
    if inst.penalty.is_box:
        return max(int(round((inst.penalty.radius + 1) / 2)), 1)
    return max(int(round((np.sqrt(3.0 / inst.penalty.lam + 1.0)) / 2.0)), 1)


def detect_pg_box(inst, opts=None):
    """Proximal gradient for the box relaxation with the spectral step size
    1/sigma_max(B)^2 (unless overridden); monotone in F."""
    if not inst.penalty.is_box:
        raise ValueError("proximal-gradient detector requires the box penalty")
    opts = opts or SolverOptions()
    eta = opts.step_size_override
    if eta is None:
        eta = 1.0 / spectral_info(inst).L_f
    counter = FftCounter()
    t0 = time.perf_counter()
    N, W = inst.N, inst.W
    s = np.zeros((N, W), dtype=complex)
    trace = SolverTrace()
    converged = False
    fft_seen = 0
    if opts.record_iterates:
        trace.iterates.append(s.copy())
    for _ in range(opts.max_outer):
        f_val, g = value_and_grad(inst, s, counter)
        if opts.record_objective:
            trace.objective.append(f_val)
        s_next = inst.penalty.prox(s - eta * g, eta)
        step = float(np.linalg.norm(s_next - s))
        prev_norm = float(np.linalg.norm(s))
        trace.step_norm.append(step)
        trace.inner_iters.append(0)
        trace.certificate.append(0.0)
        trace.fft_count.append(counter.count - fft_seen)
        fft_seen = counter.count
        trace.wall_s.append(time.perf_counter() - t0)
        s = s_next
        if opts.record_iterates:
            trace.iterates.append(s.copy())
        if _stop(step, prev_norm, opts.stop_rel):
            converged = True
            break
    if opts.record_objective:
        trace.objective.append(eval_f(inst, s, counter))
    return DetectionResult(
        s_soft=s,
        s_hard=hard_decision(s, _infer_levels(inst)),
        trace=trace,
        converged=converged,
    )


def inner_apg(gram, rhs, eta_w, sigma_sq, penalty, warm, eps, max_inner):
    """Accelerated proximal gradient on the W decoupled M-step problems.

    ``gram`` is the (W, N, N) stack H_w^H H_w, ``rhs`` the (W, N) stack
    H_w^H r_w, ``eta_w`` the per-subcarrier steps 1/sigma_max(H_w)^2.
    Runs all subcarriers in lockstep until the global certificate
    sqrt(sum_w e_w^2) drops to ``eps`` (or the cap).  Returns
    ``(solution, per_subcarrier_certificates, iterations, hit_cap)``.
    """
    sj = warm.copy()
    sj_ex = warm.copy()
    t = 1.0
    eta_col = eta_w[:, None]
    eps_sq = eps * eps
    j = 0
    while True:
        g = np.einsum("wnk,wk->wn", gram, sj_ex) - rhs
        s_next = penalty.prox(sj_ex - eta_col * g, eta_col * sigma_sq)
        t, alpha = _fista_step(t)
        sj_ex = s_next + alpha * (s_next - sj)
        sj = s_next
        j += 1
        gt = (np.einsum("wnk,wk->wn", gram, sj) - rhs) / sigma_sq
        cert_sq = penalty.cert_residual_sq(gt, sj)
        total = float(cert_sq.sum())
        if total <= eps_sq:
            return sj, np.sqrt(cert_sq), j, False
        if j >= max_inner:
            return sj, np.sqrt(cert_sq), j, True


def detect_em(inst, opts=None):
    """Conditional-mean (EM-style) detector, exact or inexact M-steps.

    Ridge penalty: M-steps solved in closed form through a per-trial cached
    Cholesky factorization of H_w^H H_w + lam sigma^2 I.  Box penalty:
    M-steps solved by warm-started inner APG to the scheduled certificate
    tolerance.  ``opts.accel`` switches the outer extrapolation on.
    """
    opts = opts or SolverOptions()
    penalty = inst.penalty
    sigma = inst.sigma
    sigma_sq = sigma * sigma
    N, W = inst.N, inst.W
    counter = FftCounter()
    t0 = time.perf_counter()

    gram = inst.sub_gram
    if penalty.is_box:
        eps_schedule = opts.eps_schedule or FixedEps(2.0 * N * W * 1e-4)
        smax = inst.sub_singulars[:, 0]
        # A zero subcarrier has zero M-step gradient; any feasible point
        # certifies, so its step size is irrelevant.
        eta_w = np.where(smax > 0, 1.0 / np.maximum(smax, 1e-150) ** 2, 0.0)
        solve_mstep = None
    else:
        # One-time factorization, reused every outer iteration.
        L = np.linalg.cholesky(gram + penalty.lam * sigma_sq * np.eye(N))
        L_inv = np.linalg.inv(L)
        gram_inv = L_inv.conj().transpose(0, 2, 1) @ L_inv

        def solve_mstep(rhs):
            return np.einsum("wnk,wk->wn", gram_inv, rhs)

    freq_c = inst.ch.freq.conj()
    s = np.zeros((N, W), dtype=complex)
    s_ex = s
    t_acc = 1.0
    trace = SolverTrace()
    converged = False
    fft_seen = 0
    if opts.record_iterates:
        trace.iterates.append(s.copy())

    for k in range(opts.max_outer):
        r = conditional_mean(inst, s_ex, counter)
        rt = unitary_fft(r, axis=1, counter=counter)
        rhs = np.einsum("wmn,wm->wn", freq_c, rt.T)
        if penalty.is_box:
            s_new_w, cert_w, inner, capped = inner_apg(
                gram, rhs, eta_w, sigma_sq, penalty, s.T.copy(),
                eps_schedule.at(k + 1), opts.max_inner,
            )
            cert = float(np.sqrt(np.sum(cert_w**2)))
            if capped:
                trace.inner_cap_hits += 1
        else:
            s_new_w = solve_mstep(rhs)
            cert, inner = 0.0, 1
        s_new = np.ascontiguousarray(s_new_w.T)

        if opts.record_objective:
            trace.objective.append(eval_f(inst, s) + penalty.value(s))
        step = float(np.linalg.norm(s_new - s))
        prev_norm = float(np.linalg.norm(s))
        trace.step_norm.append(step)
        trace.inner_iters.append(inner)
        trace.certificate.append(cert)
        trace.fft_count.append(counter.count - fft_seen)
        fft_seen = counter.count
        trace.wall_s.append(time.perf_counter() - t0)

        if opts.accel:
            t_acc, alpha = _fista_step(t_acc)
            s_ex = s_new + alpha * (s_new - s)
        else:
            s_ex = s_new
        done = _stop(step, prev_norm, opts.stop_rel)
        s = s_new
        if opts.record_iterates:
            trace.iterates.append(s.copy())
        if done:
            converged = True
            break

    if opts.record_objective:
        trace.objective.append(eval_f(inst, s) + penalty.value(s))
    return DetectionResult(
        s_soft=s,
        s_hard=hard_decision(s, _infer_levels(inst)),
        trace=trace,
        converged=converged,
    )
