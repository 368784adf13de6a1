"""Monte Carlo baseline: sample the input distribution, push the samples
through the network, and report output sample statistics.

Sampling is counter-based: the randomness for sample k comes from a
Philox generator keyed by (seed, k), so any partition of the index range
across workers reproduces exactly the same samples, and the final
statistics are reduced once over the index-ordered output array.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .linalg import check_symmetric, psd_sqrt, symmetrize
from .network import as_matrix, as_vector, forward_batch


@dataclass(eq=False)
class SampleStats:
    """Unbiased sample moments of the network outputs."""

    n: int
    mean: np.ndarray
    cov: np.ndarray
    std: np.ndarray


@dataclass(eq=False)
class ComparisonReport:
    """Componentwise agreement between two std vectors (e.g. EKF vs MC)."""

    abs_diff: np.ndarray
    rel_diff: np.ndarray
    max_abs: float
    mean_abs: float
    max_rel: float
    mean_rel: float


REL_DIFF_FLOOR = 1e-9


def _gaussian_block(x0, root, seed, start, count):
    """Samples x0 + root @ z_k for k in [start, start+count)."""
    d = x0.shape[0]
    zs = np.empty((count, d))
    for i in range(count):
        key = np.array([seed, start + i], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key))
        zs[i] = gen.standard_normal(d)
    return x0 + zs @ root


def sample_inputs(x0, sigma0, n, seed):
    """Draw n input samples from N(x0, sigma0), deterministically.

    Sample k is a pure function of (seed, k); the covariance square root
    is the symmetric PSD one, so sigma0 = 0 reproduces x0 exactly.
    """
    x0 = as_vector(x0, "x0")
    sigma0 = as_matrix(sigma0, "sigma0")
    if sigma0.shape[0] != x0.shape[0]:
        raise ShapeError(
            f"sigma0 is {sigma0.shape[0]} x {sigma0.shape[0]} but x0 has "
            f"length {x0.shape[0]}"
        )
    if n < 1:
        raise ShapeError("sample count must be at least 1")
    root = psd_sqrt(sigma0, "sigma0")
    return _gaussian_block(x0, root, seed, 0, n)


def _stats_from_outputs(ys):
    """Mean/cov/std of output rows.

    The mean is accumulated relative to the first row, so identical rows
    give exactly zero covariance.
    """
    n = ys.shape[0]
    mean = ys[0] + (ys - ys[0]).mean(axis=0)
    if n > 1:
        dev = ys - mean
        cov = symmetrize(dev.T @ dev / (n - 1))
    else:
        cov = np.zeros((ys.shape[1], ys.shape[1]))
    std = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return SampleStats(n=n, mean=mean, cov=cov, std=std)


def mc_propagate(net, x0, sigma0, n, seed, chunk=1024):
    """Sample, forward, and reduce to output sample statistics.

    `chunk` only bounds working memory: samples are generated and
    forwarded in blocks but written into one index-ordered output array,
    so the result is bit-identical for every chunk size.
    """
    x0 = as_vector(x0, "x0")
    if x0.shape[0] != net.dims[0]:
        raise ShapeError(
            f"x0 length {x0.shape[0]} does not match network input "
            f"width {net.dims[0]}"
        )
    sigma0 = as_matrix(sigma0, "sigma0")
    if n < 1:
        raise ShapeError("sample count must be at least 1")
    root = psd_sqrt(sigma0, "sigma0")
    ys = np.empty((n, net.dims[-1]))
    for start in range(0, n, chunk):
        count = min(chunk, n - start)
        block = _gaussian_block(x0, root, seed, start, count)
        ys[start : start + count] = forward_batch(net, block)
    return _stats_from_outputs(ys)


def compare_stats(ekf_std, mc_std):
    """Componentwise absolute and relative differences of two std vectors.

    Relative differences use max(mc_std, REL_DIFF_FLOOR) as denominator.
    """
    ekf_std = as_vector(ekf_std, "ekf_std")
    mc_std = as_vector(mc_std, "mc_std")
    if ekf_std.shape != mc_std.shape:
        raise ShapeError(
            f"std vectors have different lengths: {ekf_std.shape[0]} vs "
            f"{mc_std.shape[0]}"
        )
    abs_diff = np.abs(ekf_std - mc_std)
    rel_diff = abs_diff / np.maximum(mc_std, REL_DIFF_FLOOR)
    return ComparisonReport(
        abs_diff=abs_diff,
        rel_diff=rel_diff,
        max_abs=float(abs_diff.max()),
        mean_abs=float(abs_diff.mean()),
        max_rel=float(rel_diff.max()),
        mean_rel=float(rel_diff.mean()),
    )
