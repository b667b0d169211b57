"""Split-search kernel with a compiled fast path and a pure fallback.

Both backends implement the same contract (``build_tree_raw``,
``apply_tree``, ``rng_doubles``) and are designed to produce bit-identical
trees.  Selection happens at import time; the METACASH_BACKEND environment
variable forces it:

- ``auto`` (default): compiled extension if importable, else pure Python
- ``compiled``: require the extension, fail loudly if missing
- ``python``: always use the fallback
"""

import os

from . import pytree

_choice = os.environ.get("METACASH_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "python"):
    raise ValueError(
        "METACASH_BACKEND must be 'auto', 'compiled' or 'python', got %r" % _choice)

if _choice == "python":
    backend = pytree
    BACKEND_NAME = "python"
else:
    try:
        from . import _speedups as backend
        BACKEND_NAME = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        backend = pytree
        BACKEND_NAME = "python"


def available_backends():
    names = ["python"]
    try:
        from . import _speedups  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Fetch a backend module by name (used by parity tests and benchmarks)."""
    if name == "python":
        return pytree
    if name == "compiled":
        from . import _speedups
        return _speedups
    raise ValueError("unknown backend %r" % name)


from .tree import CRITERIA, SPLITTERS, Tree, grow_tree  # noqa: E402,F401
