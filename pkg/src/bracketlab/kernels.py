"""Backend selection for the enumeration loops.

The compiled extension is used when it imports; set
``BRACKETLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("BRACKETLAB_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

bracket_tally = _impl.bracket_tally
rr_tally = _impl.rr_tally
rr_completion_classes = _impl.rr_completion_classes


def backends():
    """All importable kernel modules, keyed by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
