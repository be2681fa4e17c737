"""Trainer for the unfolded one-bit MIMO-OFDM detector's per-layer scalars.

Consumes dataset directories and produces the parameter JSON file the
detector package loads; the two packages share only those file formats.
"""

__version__ = "0.1.0"

from .data import TrainingInstance, load_training_set  # noqa: F401
from .network import LayerParams, multilevel_sigmoid, prepare_instance, unrolled_forward  # noqa: F401
from .training import TrainResult, default_init, save_params, train  # noqa: F401
