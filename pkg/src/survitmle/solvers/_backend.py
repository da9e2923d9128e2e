"""Kernel selection: compiled extension if importable, numpy fallback otherwise.

Set SURVITMLE_PURE_PYTHON=1 to force the fallback (used by the benchmark and
by fallback-parity tests).
"""

import os

if os.environ.get("SURVITMLE_PURE_PYTHON") == "1":
    from . import _cd_numpy as _impl

    KERNEL = "numpy"
else:
    try:
        from . import _cd_kernel as _impl  # type: ignore[attr-defined]

        KERNEL = "compiled"
    except ImportError:
        from . import _cd_numpy as _impl

        KERNEL = "numpy"

enet_cd = _impl.enet_cd


def kernel_name() -> str:
    return KERNEL
