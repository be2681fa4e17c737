"""One-bit MIMO-OFDM detection.

Detectors for recovering QAM symbols from sign-quantized multi-antenna OFDM
receive signals: zero-forcing, box proximal gradient, exact / accelerated /
inexact conditional-mean (EM-style) schemes, and a deep-unfolded network
forward pass; plus a Monte-Carlo harness, convergence-bound verifier, and a
dataset exporter for training the unfolded detector's parameters.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    MultipathChannel,
    OneBitObservation,
    SymbolBlock,
    SystemConfig,
    draw_symbols,
    generate_channel,
    quantize_one_bit,
    snr_to_sigma,
    subcarrier_channels,
    symbol_energy,
    transmit,
    trial_rng,
)
from .objective import (  # noqa: F401
    Penalty,
    ProblemInstance,
    SpectralInfo,
    conditional_mean,
    eval_f,
    grad_f,
    spectral_info,
    surrogate_gap,
    value_and_grad,
)
from .solvers import (  # noqa: F401
    DetectionResult,
    FixedEps,
    PowerLawEps,
    SolverOptions,
    SolverTrace,
    box_certificate,
    detect_em,
    detect_pg_box,
    detect_zf,
    fista_coefficients,
    hard_decision,
    inner_apg,
)
from .diem import (  # noqa: F401
    DiemParams,
    default_params,
    diem_forward,
    load_params,
    multilevel_sigmoid,
    save_params,
)
from .harness import (  # noqa: F401
    DetectorSpec,
    TrialRecord,
    check_bounds,
    compute_ber,
    run_bound_suite,
    run_sweep,
    run_trial,
)
from .dataio import export_dataset, load_dataset  # noqa: F401
