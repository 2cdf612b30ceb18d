"""Backend selection for the hot kernels.

The compiled extension is used when importable; otherwise the NumPy
fallback. ``use_backend`` switches explicitly (tests and the benchmark
exercise both).
"""

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

AVAILABLE = ("compiled", "python") if _compiled is not None else ("python",)
BACKEND = AVAILABLE[0]
_impl = _compiled if _compiled is not None else _kernels_py


def use_backend(name: str) -> None:
    global BACKEND, _impl
    if name not in AVAILABLE:
        raise ValueError(f"backend {name!r} not available; have {AVAILABLE}")
    BACKEND = name
    _impl = _compiled if name == "compiled" else _kernels_py


def get_module(name: str):
    if name not in AVAILABLE:
        raise ValueError(f"backend {name!r} not available; have {AVAILABLE}")
    return _compiled if name == "compiled" else _kernels_py


def liouvillian_matrix(h, jumps, rates):
    return _impl.liouvillian_matrix(h, jumps, rates)


def rk4_affine(a, b, y0, h, nsteps):
    return _impl.rk4_affine(a, b, y0, h, nsteps)


def hermitian_generator(m, d):
    return _impl.hermitian_generator(m, d)
