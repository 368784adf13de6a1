"""Feedforward ReLU network: parameters, traced inference, model files.

A network is an ordered list of weighted layers acting by left
multiplication: layer ``l`` maps the previous state through
``max(0, W_l x + b_l)``. Every layer, including the last, applies ReLU,
so all post-input states are nonnegative.

Model files are self-describing JSON documents (format tag, version,
dims, per-layer arrays). Floats are written as shortest round-trip
decimal literals, so save/load is bit-exact.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import FormatError, NumericError, ShapeError

MODEL_FORMAT = "ekfprop-model"
MODEL_VERSION = 1


def as_vector(x, name="vector"):
    """Coerce to a float64 1-D C-contiguous array."""
    v = np.ascontiguousarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {v.shape}")
    return v


def as_matrix(x, name="matrix"):
    """Coerce to a float64 2-D C-contiguous array."""
    m = np.ascontiguousarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be two-dimensional, got shape {m.shape}")
    return m


@dataclass(eq=False)
class LayerParams:
    """One weighted layer: `weights` is (d_out, d_in), `bias` is (d_out,)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.weights = as_matrix(self.weights, "weights")
        self.bias = as_vector(self.bias, "bias")
        if self.bias.shape[0] != self.weights.shape[0]:
            raise ShapeError(
                f"bias length {self.bias.shape[0]} does not match "
                f"weight row count {self.weights.shape[0]}"
            )
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise NumericError("layer parameters must be finite")
        self.weights.flags.writeable = False
        self.bias.flags.writeable = False

    @property
    def out_dim(self):
        return self.weights.shape[0]

    @property
    def in_dim(self):
        return self.weights.shape[1]


@dataclass(eq=False)
class Network:
    """An immutable stack of ReLU layers."""

    layers: list[LayerParams]

    def __post_init__(self):
        if not self.layers:
            raise ShapeError("a network needs at least one layer")
        self.layers = list(self.layers)
        for l, (prev, cur) in enumerate(zip(self.layers, self.layers[1:]), start=2):
            if cur.in_dim != prev.out_dim:
                raise ShapeError(
                    f"layer {l} expects input width {cur.in_dim} but "
                    f"layer {l - 1} produces width {prev.out_dim}"
                )

    @property
    def dims(self):
        """Layer widths [d_0, d_1, ..., d_L]."""
        return [self.layers[0].in_dim] + [lay.out_dim for lay in self.layers]

    @property
    def depth(self):
        """Number of weighted layers L."""
        return len(self.layers)


@dataclass(eq=False)
class ActivationTrace:
    """States [x_0, x_1, ..., x_L] recorded during one forward pass."""

    states: list[np.ndarray] = field(default_factory=list)

    @property
    def output(self):
        return self.states[-1]


def relu(v):
    """Componentwise max(0, v)."""
    v = as_vector(v, "relu input")
    if not np.isfinite(v).all():
        raise NumericError("relu input must be finite")
    return np.maximum(v, 0.0)


def forward(net, x0):
    """Run inference, recording every layer state.

    Parameters
    ----------
    net : Network
    x0 : (d_0,) array_like
        Input vector.

    Returns
    -------
    ActivationTrace
        states[0] is x0; states[l] = max(0, W_l states[l-1] + b_l).
    """
    x = as_vector(x0, "x0")
    if not np.isfinite(x).all():
        raise NumericError("x0 must be finite")
    if x.shape[0] != net.dims[0]:
        raise ShapeError(
            f"input length {x.shape[0]} does not match layer 1 "
            f"input width {net.dims[0]}"
        )
    states = [x]
    for l, lay in enumerate(net.layers, start=1):
        if states[-1].shape[0] != lay.in_dim:
            raise ShapeError(f"state entering layer {l} has wrong length")
        states.append(backend.affine_relu(lay.weights, lay.bias, states[-1]))
    return ActivationTrace(states)


def forward_batch(net, xs):
    """Forward a batch (n, d_0) of inputs; returns only the (n, d_L) outputs."""
    ys = as_matrix(xs, "input batch")
    if ys.shape[1] != net.dims[0]:
        raise ShapeError(
            f"batch width {ys.shape[1]} does not match input width {net.dims[0]}"
        )
    for lay in net.layers:
        ys = backend.affine_relu_batch(lay.weights, lay.bias, ys)
    return ys


def networks_equal(a, b):
    """Bit-exact equality of two networks' parameters."""
    return a.dims == b.dims and all(
        np.array_equal(la.weights, lb.weights) and np.array_equal(la.bias, lb.bias)
        for la, lb in zip(a.layers, b.layers)
    )


def save_model(net, path):
    """Write a network to a model file (bit-exact round trip)."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "dims": net.dims,
        "layers": [
            {"weights": lay.weights.tolist(), "bias": lay.bias.tolist()}
            for lay in net.layers
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, allow_nan=False)
        fh.write("\n")


def _reject_constant(token):
    raise FormatError(f"non-finite value {token!r} in model file")


def load_model(path):
    """Read a model file, validating dims, shapes, and finiteness."""
    with open(path) as fh:
        try:
            doc = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed model file {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise FormatError(f"{path} is not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise FormatError(f"unsupported model file version {doc.get('version')!r}")
    dims = doc.get("dims")
    raw_layers = doc.get("layers")
    if not isinstance(dims, list) or not isinstance(raw_layers, list):
        raise FormatError(f"{path} is missing dims or layers")
    if len(raw_layers) != len(dims) - 1 or len(dims) < 2:
        raise FormatError(
            f"{path} declares {len(dims)} dims but holds {len(raw_layers)} layers"
        )
    layers = []
    for l, raw in enumerate(raw_layers, start=1):
        try:
            w = np.array(raw["weights"], dtype=np.float64)
            b = np.array(raw["bias"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad arrays for layer {l} in {path}: {exc}") from exc
        if w.shape != (dims[l], dims[l - 1]):
            raise FormatError(
                f"layer {l} weights have shape {w.shape}, expected "
                f"({dims[l]}, {dims[l - 1]})"
            )
        if b.shape != (dims[l],):
            raise FormatError(
                f"layer {l} bias has length {b.shape}, expected {dims[l]}"
            )
        try:
            layers.append(LayerParams(w, b))
        except NumericError as exc:
            raise FormatError(f"layer {l} in {path}: {exc}") from exc
    return Network(layers)
