"""Kernel backend selection.

Prefers the compiled Cython extension and falls back to the pure-Python
implementation. Set EXPLOREBENCH_PURE=1 to force the fallback.
"""

import os

from . import pure

if os.environ.get("EXPLOREBENCH_PURE") == "1":
    _impl = pure
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
bfs_from = _impl.bfs_from
best_orienteering = _impl.best_orienteering

# The compiled path tracks visited nodes in a 64-bit mask.
MAX_COMPILED_NODES = 62

pure_bfs_from = pure.bfs_from
pure_best_orienteering = pure.best_orienteering
