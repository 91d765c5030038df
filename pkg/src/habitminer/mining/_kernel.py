"""Selects the mining kernel at import: compiled if available, else pure.

Set HABITMINER_PURE_KERNEL=1 to force the pure-Python kernel (used by the
benchmark and the parity tests).
"""

import os

if os.environ.get("HABITMINER_PURE_KERNEL") == "1":
    from ._growth_py import mine_sequences

    KERNEL_NAME = "python"
else:
    try:
        from ._growth_cy import mine_sequences  # type: ignore[attr-defined]

        KERNEL_NAME = "compiled"
    except ImportError:
        from ._growth_py import mine_sequences

        KERNEL_NAME = "python"

__all__ = ["mine_sequences", "KERNEL_NAME"]
