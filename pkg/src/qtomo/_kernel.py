"""Search kernel selection.

The compiled kernel is used when it was built; otherwise the pure-Python
implementation with the identical contract is used. ``BACKEND`` names the
active one.
"""
from . import _pysearch

EXHAUSTED = _pysearch.EXHAUSTED
STOPPED = _pysearch.STOPPED
BUDGET = _pysearch.BUDGET

search_py = _pysearch.search

try:
    from ._csearch import search as search_c
except ImportError:  # extension not built
    search_c = None

if search_c is not None:
    search = search_c
    BACKEND = "cython"
else:
    search = search_py
    BACKEND = "python"


def available_backends():
    """Map backend name to search function for every importable backend."""
    out = {"python": search_py}
    if search_c is not None:
        out["cython"] = search_c
    return out
