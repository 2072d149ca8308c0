"""Selects the compiled trajectory kernels when available, else the pure-Python fallback."""

try:
    from . import _speedups as _impl

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build environment
    from . import _fallback as _impl

    HAVE_COMPILED = False

run_composition = _impl.run_composition
run_frozen = _impl.run_frozen

BACKEND = "compiled" if HAVE_COMPILED else "pure-python"
