"""Gaussian uncertainty propagation through ReLU networks.

Propagates an input mean/covariance through a trained feedforward ReLU
network layer by layer with the Kalman prediction recursion, optionally
adding per-layer process noise estimated from calibration data, and
validates against a Monte Carlo sampling baseline.
"""

from .backend import active_backend, available_backends
from .data import LabeledDataset, read_idx, read_vectors_csv
from .ekf import BeliefState, PropagationMode, jacobian, predict_cov, propagate
from .errors import EkfPropError, FormatError, NumericError, ShapeError
from .monte_carlo import SampleStats, compare_stats, mc_propagate, sample_inputs
from .network import (
    ActivationTrace,
    LayerParams,
    Network,
    forward,
    forward_batch,
    load_model,
    relu,
    save_model,
)
from .noise import ProcessNoiseSet, estimate_process_noise, load_noise, save_noise
from .postprocess import (
    ErrorBarSet,
    make_error_bars,
    rmse_by_label,
    truncated_variance,
)
from .training import evaluate_accuracy, train

__version__ = "0.1.0"

__all__ = [
    "ActivationTrace",
    "BeliefState",
    "EkfPropError",
    "ErrorBarSet",
    "FormatError",
    "LabeledDataset",
    "LayerParams",
    "Network",
    "NumericError",
    "ProcessNoiseSet",
    "PropagationMode",
    "SampleStats",
    "ShapeError",
    "active_backend",
    "available_backends",
    "compare_stats",
    "estimate_process_noise",
    "evaluate_accuracy",
    "forward",
    "forward_batch",
    "jacobian",
    "load_model",
    "load_noise",
    "make_error_bars",
    "mc_propagate",
    "predict_cov",
    "propagate",
    "read_idx",
    "read_vectors_csv",
    "relu",
    "rmse_by_label",
    "sample_inputs",
    "save_model",
    "save_noise",
    "train",
    "truncated_variance",
]
