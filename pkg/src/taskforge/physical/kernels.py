"""Geometry kernel backend selection.

Imports the compiled extension when it is built, otherwise the pure-Python
twin. Set ``TASKFORGE_PURE_PYTHON=1`` to force the fallback (used by tests
and the benchmark to compare backends). Both expose the same functions over
the packed ``array('d')`` scene layout; see ``_kernels_py`` for semantics.
"""

from __future__ import annotations

import os

if os.environ.get("TASKFORGE_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

dist_sq = _impl.dist_sq
box_min_dist_sq = _impl.box_min_dist_sq
pair_overlaps = _impl.pair_overlaps
any_overlap = _impl.any_overlap
pairwise_overlaps = _impl.pairwise_overlaps


def backend() -> str:
    """Name of the active kernel backend: "compiled" or "python"."""
    return BACKEND
