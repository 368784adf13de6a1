"""Minimal SGD trainer so experiments are self-contained.

Loss is mean squared error against one-hot targets with ReLU on the
output layer, keeping output semantics (nonnegative per-class scores)
identical to what the propagation machinery expects. Deterministic for
a fixed seed; single-threaded on purpose.
"""

import numpy as np

from .errors import NumericError, ShapeError
from .network import LayerParams, Network, forward_batch


def _forward_with_preacts(layers, a0):
    acts = [a0]
    preacts = []
    for w, b in layers:
        z = acts[-1] @ w.T + b
        preacts.append(z)
        acts.append(np.maximum(z, 0.0))
    return acts, preacts


def train(data, dims, epochs, lr, batch, seed):
    """Train a ReLU MLP of the given layer widths.

    Parameters
    ----------
    data : LabeledDataset
    dims : list[int]
        Layer widths [d_0, ..., d_L]; d_0 must match the input width and
        d_L the class count.
    epochs, lr, batch : training hyperparameters (all positive)
    seed : int
        Controls init and batch order; same seed gives a bit-identical
        network.
    """
    if len(data) == 0:
        raise ShapeError("training data is empty")
    if epochs <= 0 or lr <= 0 or batch <= 0:
        raise ShapeError("epochs, lr, and batch must all be positive")
    if len(dims) < 2:
        raise ShapeError("dims needs at least an input and an output width")
    xs = data.vectors
    labels = data.labels
    if dims[0] != xs.shape[1]:
        raise ShapeError(
            f"dims[0]={dims[0]} does not match input width {xs.shape[1]}"
        )
    if labels.min() < 0 or labels.max() >= dims[-1]:
        raise ShapeError(
            f"labels span [{labels.min()}, {labels.max()}] but the output "
            f"width is {dims[-1]}"
        )

    rng = np.random.default_rng(seed)
    layers = []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        scale = 1.0 / np.sqrt(d_in)
        layers.append(
            (rng.uniform(-scale, scale, size=(d_out, d_in)), np.zeros(d_out))
        )

    targets = np.zeros((len(data), dims[-1]))
    targets[np.arange(len(data)), labels] = 1.0

    n = len(data)
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start : start + batch]
            a0, y = xs[idx], targets[idx]
            acts, preacts = _forward_with_preacts(layers, a0)
            # d(mean_k ||a_L - y_k||^2) / d a_L
            grad = 2.0 * (acts[-1] - y) / idx.shape[0]
            for l in range(len(layers) - 1, -1, -1):
                w, b = layers[l]
                delta = grad * (preacts[l] > 0.0)
                grad = delta @ w
                layers[l] = (
                    w - lr * (delta.T @ acts[l]),
                    b - lr * delta.sum(axis=0),
                )
        for w, b in layers:
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise NumericError(
                    f"non-finite parameters after epoch {epoch + 1}; "
                    f"lower the learning rate"
                )

    return Network([LayerParams(w, b) for w, b in layers])


def evaluate_accuracy(net, data):
    """Fraction of inputs whose argmax output matches the label."""
    if len(data) == 0:
        raise ShapeError("evaluation data is empty")
    preds = forward_batch(net, data.vectors)
    return float(np.mean(preds.argmax(axis=1) == data.labels))
