"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
twin is the fallback.  ``SEQTRIAL_BACKEND=python`` or
``SEQTRIAL_BACKEND=compiled`` forces a choice (the latter raises if the
extension is missing).  Both backends are bit-identical by construction,
so the switch only affects speed.
"""

from __future__ import annotations

import os

_forced = os.environ.get("SEQTRIAL_BACKEND", "").strip().lower()

if _forced == "python":
    from seqtrial import _pykernels as kernels
elif _forced == "compiled":
    from seqtrial import _ckernels as kernels  # type: ignore[no-redef]
elif _forced == "":
    try:
        from seqtrial import _ckernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from seqtrial import _pykernels as kernels
else:
    raise RuntimeError(
        f"SEQTRIAL_BACKEND={_forced!r} not understood (use 'python' or 'compiled')"
    )


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return kernels.BACKEND
