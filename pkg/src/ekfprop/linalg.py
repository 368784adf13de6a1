"""Symmetry and positive-semidefiniteness helpers for covariance matrices."""

import numpy as np

from .errors import NumericError, ShapeError
from .network import as_matrix

# Relative slack on the minimum eigenvalue of a nominally PSD matrix.
PSD_EIG_TOL = 1e-8
# Stricter slack used when taking a matrix square root for sampling.
SQRT_EIG_TOL = 1e-10
SYM_TOL = 1e-8


def check_square(m, name="matrix"):
    m = as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    return m


def check_symmetric(m, name="matrix", tol=SYM_TOL):
    """Validate symmetry within `tol` (absolute, scaled by the max entry)."""
    m = check_square(m, name)
    if m.size:
        asym = np.abs(m - m.T).max()
        if asym > tol * (1.0 + np.abs(m).max()):
            raise NumericError(f"{name} is asymmetric beyond tolerance: {asym:g}")
    return m


def check_psd(m, name="matrix", tol=PSD_EIG_TOL):
    """Validate min eigenvalue >= -tol * trace; checked, never repaired."""
    m = check_symmetric(m, name)
    if m.size == 0:
        return m
    min_eig = float(np.linalg.eigvalsh(m)[0])
    floor = -tol * max(float(np.trace(m)), 0.0)
    if min_eig < floor:
        raise NumericError(
            f"{name} is not positive semidefinite: min eigenvalue "
            f"{min_eig:g} below {floor:g}"
        )
    return m


def symmetrize(m):
    return (m + m.T) / 2.0


def psd_sqrt(m, name="matrix"):
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-SQRT_EIG_TOL * trace, 0) are treated as estimator
    round-off and clamped to zero; anything lower is rejected.
    """
    m = check_symmetric(m, name)
    evals, evecs = np.linalg.eigh(m)
    floor = -SQRT_EIG_TOL * max(float(np.trace(m)), 0.0)
    if evals.size and float(evals[0]) < floor:
        raise NumericError(
            f"{name} is not positive semidefinite within square-root "
            f"tolerance: min eigenvalue {float(evals[0]):g}"
        )
    root = evecs * np.sqrt(np.clip(evals, 0.0, None)) @ evecs.T
    return symmetrize(root)
