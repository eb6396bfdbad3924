"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementations in
``_py`` when the extension is missing or MULTCORR_PURE=1 is set.  Everything
downstream imports ``spf_sieve`` etc. from this package and never cares which
backend answered.
"""

import os

from . import _py

if os.environ.get("MULTCORR_PURE"):
    _impl = _py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _py
        BACKEND = "python"

spf_sieve = _impl.spf_sieve
fill_multiplicative = _impl.fill_multiplicative
corr_inner1 = _impl.corr_inner1
corr_inner2 = _impl.corr_inner2
corr_inner3 = _impl.corr_inner3

__all__ = [
    "BACKEND",
    "spf_sieve",
    "fill_multiplicative",
    "corr_inner1",
    "corr_inner2",
    "corr_inner3",
]
