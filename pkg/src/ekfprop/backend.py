"""Kernel backend selection.

The compiled extension (``ekfprop._core``) is preferred when it imported
successfully; otherwise the NumPy fallback is used. The choice can be
forced with the environment variable ``EKFPROP_KERNELS``:

    auto      pick the compiled core when available (default)
    compiled  require the compiled core, fail if missing
    numpy     force the NumPy fallback

Both backends expose the same four kernels and agree to floating-point
rounding; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

from . import _kernels_np

try:
    from . import _core
except ImportError:
    _core = None

_BACKENDS = {"numpy": _kernels_np}
if _core is not None:
    _BACKENDS["compiled"] = _core


def available_backends():
    """Names of the backends importable in this environment."""
    return sorted(_BACKENDS)


def get_backend(name):
    """Return the kernel module for `name` ('compiled' or 'numpy')."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ImportError(
            f"kernel backend {name!r} is not available; "
            f"available: {', '.join(available_backends())}"
        ) from None


def _select_default():
    requested = os.environ.get("EKFPROP_KERNELS", "auto").lower()
    if requested == "auto":
        return _BACKENDS.get("compiled", _kernels_np)
    return get_backend(requested)


_active = _select_default()


def active_backend():
    """Name of the backend currently in use."""
    return "compiled" if _active is _core and _core is not None else "numpy"


def set_backend(name):
    """Switch the active backend (used by tests and benchmarks)."""
    global _active
    _active = get_backend(name)


def affine_relu(w, b, x):
    return _active.affine_relu(w, b, x)


def affine_relu_batch(w, b, xs):
    return _active.affine_relu_batch(w, b, xs)


def sym_sandwich(a, s):
    return _active.sym_sandwich(a, s)


def centered_gram(xs, mean):
    return _active.centered_gram(xs, mean)
