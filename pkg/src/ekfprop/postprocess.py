"""Turn output beliefs into reportable quantities.

Covers the variance correction for nonnegative outputs (lower-truncated
normal on [0, +inf)), zero-clamped error bars, and the per-label RMSE
baseline used as a rough empirical stand-in for model error.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr

from .errors import NumericError, ShapeError
from .network import as_vector, forward_batch

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# Past this standardized boundary the plain pdf/cdf ratio loses accuracy,
# so the tail ratio switches to log space.
_TAIL_SWITCH = 5.0


@dataclass(eq=False)
class ErrorBarSet:
    """Per-component summary of an output belief."""

    center: np.ndarray
    sigma_raw: np.ndarray
    sigma_truncated: np.ndarray
    bar_low: np.ndarray
    bar_high: np.ndarray
    multiplier: float
    truncated: bool


def _inverse_mills(alpha):
    """phi(alpha) / (1 - Phi(alpha)), stable far into the upper tail."""
    log_tail = log_ndtr(-alpha)
    if log_tail == -np.inf:
        raise NumericError(
            "truncated-normal mass on [0, +inf) underflows entirely"
        )
    if alpha <= _TAIL_SWITCH:
        return math.exp(-0.5 * alpha * alpha - _LOG_SQRT_2PI) / ndtr(-alpha)
    return math.exp(-0.5 * alpha * alpha - _LOG_SQRT_2PI - log_tail)


def truncated_variance(mu, var):
    """Variance of N(mu, var) conditioned on [0, +inf).

    With sigma = sqrt(var), alpha = -mu/sigma and lam the inverse Mills
    ratio at alpha, the result is var * (1 + alpha*lam - lam^2). Always
    strictly less than var for finite mu.
    """
    if var <= 0.0:
        raise NumericError(f"variance must be positive, got {var!r}")
    sigma = math.sqrt(var)
    alpha = -mu / sigma
    lam = _inverse_mills(alpha)
    return var * (1.0 + alpha * lam - lam * lam)


def make_error_bars(belief, multiplier=1.0, truncate=False):
    """Componentwise error bars for an output belief state.

    Raw sigmas come from the covariance diagonal (entries in
    [-1e-12, 0) are treated as round-off and clamped to zero); the
    truncated sigmas apply the nonnegative-support variance correction.
    Bars use the truncated sigma when `truncate` is set and are clamped
    at zero below.
    """
    if multiplier <= 0.0:
        raise NumericError(f"sigma multiplier must be positive, got {multiplier!r}")
    center = as_vector(belief.mean, "belief mean")
    diag = np.diag(belief.cov).copy()
    if (diag < -1e-12).any():
        raise NumericError(
            f"covariance diagonal has negative entries: min {diag.min():g}"
        )
    np.clip(diag, 0.0, None, out=diag)
    sigma_raw = np.sqrt(diag)
    sigma_trunc = np.array(
        [
            math.sqrt(truncated_variance(c, v)) if v > 0.0 else 0.0
            for c, v in zip(center, diag)
        ]
    )
    sigma = sigma_trunc if truncate else sigma_raw
    bar_low = np.maximum(0.0, center - multiplier * sigma)
    bar_high = center + multiplier * sigma
    return ErrorBarSet(
        center=center,
        sigma_raw=sigma_raw,
        sigma_truncated=sigma_trunc,
        bar_low=bar_low,
        bar_high=bar_high,
        multiplier=multiplier,
        truncated=truncate,
    )


def rmse_by_label(net, inputs, labels, target_label):
    """Per-component RMSE of predictions against the one-hot target over
    the subset of inputs carrying `target_label`."""
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels)
    if inputs.shape[0] != labels.shape[0]:
        raise ShapeError(
            f"{inputs.shape[0]} inputs but {labels.shape[0]} labels"
        )
    n_out = net.dims[-1]
    if not 0 <= target_label < n_out:
        raise ShapeError(
            f"target label {target_label} outside output range [0, {n_out})"
        )
    subset = inputs[labels == target_label]
    if subset.shape[0] == 0:
        raise ShapeError(f"no inputs carry label {target_label}")
    preds = forward_batch(net, subset)
    target = np.zeros(n_out)
    target[target_label] = 1.0
    return np.sqrt(np.mean((preds - target) ** 2, axis=0))
