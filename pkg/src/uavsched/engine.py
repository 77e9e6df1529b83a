"""Selects the placement-engine backend at import time.

The compiled extension is preferred when it built; ``UAVSCHED_PURE=1`` forces
the pure-Python twin (useful for parity tests and as a fallback platform).
Both backends implement the same integer arithmetic and return identical
results.
"""

import os

if os.environ.get("UAVSCHED_PURE") == "1":
    from .engine_py import PyEngine as Engine
    BACKEND = "pure"
else:
    try:
        from ._speed import CEngine as Engine
        BACKEND = "compiled"
    except ImportError:
        from .engine_py import PyEngine as Engine
        BACKEND = "pure"

__all__ = ["Engine", "BACKEND"]
