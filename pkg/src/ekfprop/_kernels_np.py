"""NumPy implementations of the hot kernels.

Fallback used when the compiled extension is unavailable; also the
reference the compiled kernels are checked against. All functions take
and return float64 C-contiguous arrays.
"""

import numpy as np


def affine_relu(w, b, x):
    """max(0, w @ x + b) for a single vector."""
    y = w @ x
    y += b
    np.maximum(y, 0.0, out=y)
    return y


def affine_relu_batch(w, b, xs):
    """max(0, xs @ w.T + b) row-wise over a batch (n, d_in) -> (n, d_out)."""
    ys = xs @ w.T
    ys += b
    np.maximum(ys, 0.0, out=ys)
    return ys


def sym_sandwich(a, s):
    """a @ s @ a.T, returned exactly symmetric via (m + m.T) / 2."""
    m = (a @ s) @ a.T
    return (m + m.T) / 2.0


def centered_gram(xs, mean):
    """sum_k outer(xs[k] - mean, xs[k] - mean), returned exactly symmetric."""
    d = xs - mean
    g = d.T @ d
    return (g + g.T) / 2.0
