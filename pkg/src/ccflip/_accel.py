"""Backend switch for the compiled kernels.

Set ``CCFLIP_NO_NUMBA=1`` to force the pure-numpy code paths.  The choice is
made once at import time; :func:`use_backend` swaps it temporarily, which is
what the benchmark and the backend-equivalence tests rely on.
"""
import contextlib
import os

_DISABLED = os.environ.get("CCFLIP_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    _njit = None

_state = {"backend": "numba" if HAVE_NUMBA else "numpy"}


def njit(fn):
    """Compile ``fn`` with numba when available, otherwise return it unchanged."""
    if _njit is None:
        return fn
    return _njit(cache=True, nogil=True)(fn)


def backend() -> str:
    return _state["backend"]


def set_backend(name: str) -> None:
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    _state["backend"] = name


@contextlib.contextmanager
def use_backend(name: str):
    old = _state["backend"]
    set_backend(name)
    try:
        yield
    finally:
        _state["backend"] = old
