"""Per-layer process noise estimated from calibration activations.

The noise matrix for layer l is the unbiased sample covariance of that
layer's activations over a calibration set run through the network.
Layer 0 carries no process noise (only the input covariance), so the
set holds L matrices indexed q[0..L-1] for layers 1..L.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import FormatError, NumericError, ShapeError
from .linalg import symmetrize
from .network import as_matrix, forward_batch

NOISE_FORMAT = "ekfprop-noise"
NOISE_VERSION = 1

# Calibration inputs are forwarded in chunks so only per-layer
# accumulators are held, never all N traces.
CHUNK = 512


@dataclass(eq=False)
class ProcessNoiseSet:
    """Sample covariances of layer activations over a calibration set."""

    q: list[np.ndarray]
    sample_count: int
    mean_activations: list[np.ndarray]

    def __post_init__(self):
        if self.sample_count < 2:
            raise ShapeError("process-noise estimation needs at least 2 samples")
        if len(self.q) != len(self.mean_activations):
            raise ShapeError("q and mean_activations must have equal length")
        for l, (m, mu) in enumerate(zip(self.q, self.mean_activations), start=1):
            if m.shape != (mu.shape[0], mu.shape[0]):
                raise ShapeError(f"q[{l}] shape {m.shape} does not match its mean")

    @property
    def dims(self):
        """Widths [d_1, ..., d_L] covered by the set."""
        return [mu.shape[0] for mu in self.mean_activations]

    def check_matches(self, net):
        if self.dims != net.dims[1:]:
            raise ShapeError(
                f"process-noise dims {self.dims} do not match network "
                f"layer widths {net.dims[1:]}"
            )


def _chunks(xs, size=CHUNK):
    for start in range(0, xs.shape[0], size):
        yield xs[start : start + size]


def _layer_outputs(net, chunk):
    """Activations of every layer for a chunk of inputs."""
    outs = []
    ys = chunk
    for lay in net.layers:
        ys = backend.affine_relu_batch(lay.weights, lay.bias, ys)
        outs.append(ys)
    return outs


def estimate_process_noise(net, calibration):
    """Estimate the per-layer noise covariances from calibration inputs.

    Two-pass computation: layer means first, then centered outer
    products. Means are accumulated relative to the first calibration
    trace, which keeps the estimate exactly zero when all inputs are
    identical and avoids cancellation otherwise.
    """
    xs = as_matrix(np.atleast_2d(np.asarray(calibration, dtype=np.float64)),
                   "calibration")
    n = xs.shape[0]
    if n < 2:
        raise ShapeError("process-noise estimation needs at least 2 samples")
    if xs.shape[1] != net.dims[0]:
        raise ShapeError(
            f"calibration width {xs.shape[1]} does not match network "
            f"input width {net.dims[0]}"
        )
    if not np.isfinite(xs).all():
        raise NumericError("calibration inputs must be finite")

    refs = [s.copy() for s in _layer_outputs(net, xs[:1])]
    sums = [np.zeros(r.shape[1]) for r in refs]
    for chunk in _chunks(xs):
        for acc, ref, out in zip(sums, refs, _layer_outputs(net, chunk)):
            if not np.isfinite(out).all():
                raise NumericError("non-finite activation in calibration pass")
            acc += (out - ref).sum(axis=0)
    means = [np.ascontiguousarray(ref[0] + acc / n) for ref, acc in zip(refs, sums)]

    grams = [np.zeros((mu.shape[0], mu.shape[0])) for mu in means]
    for chunk in _chunks(xs):
        for g, mu, out in zip(grams, means, _layer_outputs(net, chunk)):
            g += backend.centered_gram(out, mu)
    q = [symmetrize(g / (n - 1)) for g in grams]
    return ProcessNoiseSet(q=q, sample_count=n, mean_activations=means)


def save_noise(noise_set, path):
    """Write a process-noise set to file (bit-exact round trip)."""
    doc = {
        "format": NOISE_FORMAT,
        "version": NOISE_VERSION,
        "dims": noise_set.dims,
        "sample_count": noise_set.sample_count,
        "mean_activations": [mu.tolist() for mu in noise_set.mean_activations],
        "q": [m.tolist() for m in noise_set.q],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, allow_nan=False)
        fh.write("\n")


def load_noise(path):
    """Read a process-noise file, validating dims against the arrays."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed noise file {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != NOISE_FORMAT:
        raise FormatError(f"{path} is not a {NOISE_FORMAT} file")
    if doc.get("version") != NOISE_VERSION:
        raise FormatError(f"unsupported noise file version {doc.get('version')!r}")
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims:
        raise FormatError(f"{path} is missing dims")
    try:
        means = [np.array(v, dtype=np.float64) for v in doc["mean_activations"]]
        q = [np.array(m, dtype=np.float64) for m in doc["q"]]
        count = int(doc["sample_count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad arrays in {path}: {exc}") from exc
    if len(q) != len(dims) or len(means) != len(dims):
        raise FormatError(f"{path} declares {len(dims)} layers, arrays disagree")
    for l, (d, m, mu) in enumerate(zip(dims, q, means), start=1):
        if m.shape != (d, d) or mu.shape != (d,):
            raise FormatError(
                f"layer {l} arrays in {path} do not match declared width {d}"
            )
    try:
        return ProcessNoiseSet(q=q, sample_count=count, mean_activations=means)
    except ShapeError as exc:
        raise FormatError(str(exc)) from exc
