"""Kalman prediction recursion over the layers of a ReLU network.

Each layer is treated as one discrete prediction step: the state mean is
the traced activation and the covariance follows

    cov_l = F_l cov_{l-1} F_l^T (+ Q_l in noisy mode)

where F_l is the layer's ReLU-masked Jacobian. There is no correction
step; the input covariance is the only injected observation noise.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import backend
from .errors import ShapeError
from .linalg import check_psd, check_symmetric, symmetrize
from .network import as_matrix, as_vector, forward


class PropagationMode(Enum):
    """Whether per-layer process noise is added to the recursion."""

    PERFECT_MODEL = "perfect"
    WITH_PROCESS_NOISE = "noisy"


@dataclass(eq=False)
class BeliefState:
    """Mean vector and covariance matrix of one layer's state."""

    mean: np.ndarray
    cov: np.ndarray


def jacobian(layer, x_l):
    """Jacobian of a ReLU layer at the post-activation state `x_l`.

    Row i equals the weight row where x_l(i) > 0 (strict) and is zero
    otherwise; the derivative at the kink is taken to be 0.
    """
    x_l = as_vector(x_l, "x_l")
    if x_l.shape[0] != layer.out_dim:
        raise ShapeError(
            f"state length {x_l.shape[0]} does not match weight row "
            f"count {layer.out_dim}"
        )
    mask = x_l > 0.0
    return np.ascontiguousarray(layer.weights * mask[:, None])


def predict_cov(prev_cov, f, q=None):
    """One covariance prediction step: F prev_cov F^T (+ Q), symmetrized.

    Parameters
    ----------
    prev_cov : (d_in, d_in) array_like
        Symmetric PSD covariance entering the layer.
    f : (d_out, d_in) array_like
        Layer Jacobian.
    q : (d_out, d_out) array_like, optional
        Symmetric PSD process noise added after the sandwich product.
    """
    prev_cov = check_symmetric(prev_cov, "prev_cov")
    f = as_matrix(f, "F")
    if f.shape[1] != prev_cov.shape[0]:
        raise ShapeError(
            f"F has {f.shape[1]} columns but prev_cov is "
            f"{prev_cov.shape[0]} x {prev_cov.shape[0]}"
        )
    cov = backend.sym_sandwich(f, prev_cov)
    if q is not None:
        q = check_symmetric(q, "Q")
        if q.shape[0] != f.shape[0]:
            raise ShapeError(
                f"Q is {q.shape[0]} x {q.shape[0]} but F has {f.shape[0]} rows"
            )
        cov = cov + q
    return symmetrize(cov)


def propagate(net, x0, sigma0, mode=PropagationMode.PERFECT_MODEL, noise=None):
    """Propagate an input belief through every layer of the network.

    Parameters
    ----------
    net : Network
    x0 : (d_0,) array_like
        Input mean.
    sigma0 : (d_0, d_0) array_like
        Input covariance (symmetric PSD; full matrices are accepted even
        though typical use is diagonal).
    mode : PropagationMode
    noise : ProcessNoiseSet, required iff mode is WITH_PROCESS_NOISE

    Returns
    -------
    (ActivationTrace, list[BeliefState])
        belief[0] is (x0, sigma0); belief[l] pairs the traced state with
        the covariance after l prediction steps. Every returned
        covariance is exactly symmetric and PSD-checked.
    """
    sigma0 = check_psd(as_matrix(sigma0, "sigma0"), "sigma0")
    if sigma0.shape[0] != net.dims[0]:
        raise ShapeError(
            f"sigma0 is {sigma0.shape[0]} x {sigma0.shape[0]} but the "
            f"network input width is {net.dims[0]}"
        )
    if mode is PropagationMode.WITH_PROCESS_NOISE:
        if noise is None:
            raise ShapeError("noisy mode requires a process-noise set")
        noise.check_matches(net)
    elif noise is not None:
        raise ShapeError("perfect-model mode does not accept process noise")

    trace = forward(net, x0)
    beliefs = [BeliefState(trace.states[0], sigma0)]
    for l, layer in enumerate(net.layers, start=1):
        f = jacobian(layer, trace.states[l])
        q = noise.q[l - 1] if noise is not None else None
        cov = predict_cov(beliefs[-1].cov, f, q)
        check_psd(cov, f"covariance after layer {l}")
        beliefs.append(BeliefState(trace.states[l], cov))
    return trace, beliefs
