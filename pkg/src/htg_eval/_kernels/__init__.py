"""Hot-kernel backend selection.

The compiled extension is preferred; the pure backend is used when the
extension is missing or ``HTG_EVAL_NO_EXT`` is set (any non-empty value).
``BACKEND`` records which one is active so reports and benchmarks can say.
"""

import os

from . import _pure

if os.environ.get("HTG_EVAL_NO_EXT"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

levenshtein_counts = _impl.levenshtein_counts
witness_edge_times = _impl.witness_edge_times

__all__ = ["BACKEND", "levenshtein_counts", "witness_edge_times"]
