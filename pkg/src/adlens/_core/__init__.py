"""Kernel backend selection: compiled extension if importable, numpy otherwise.

Set ADLENS_PURE_PYTHON=1 to force the fallback (used by the benchmark and
by tests that compare the two backends).
"""

import os

from adlens._core import pairgrad_py

if os.environ.get("ADLENS_PURE_PYTHON"):
    _impl = pairgrad_py
    BACKEND = "python"
else:
    try:
        from adlens._core import _pairgrad as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = pairgrad_py
        BACKEND = "python"

accumulate_pair_grads = _impl.accumulate_pair_grads


def available_backends() -> dict:
    """Importable kernel implementations keyed by backend name."""
    backends = {"python": pairgrad_py.accumulate_pair_grads}
    try:
        from adlens._core import _pairgrad

        backends["compiled"] = _pairgrad.accumulate_pair_grads
    except ImportError:
        pass
    return backends
