"""Select the compiled kernel module, falling back to numpy.

``EMBOLIC_BACKEND=python`` forces the fallback; ``EMBOLIC_BACKEND=cython``
makes a missing extension an import error instead of a silent fallback.
"""

import importlib
import os

_choice = os.environ.get("EMBOLIC_BACKEND", "").strip().lower()

if _choice == "python":
    from . import _core_py as core
else:
    try:
        from . import _core as core
    except ImportError:
        if _choice == "cython":
            raise
        from . import _core_py as core

NAME = "cython" if core.__name__.endswith("._core") else "python"


def available():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    try:
        importlib.import_module(f"{__package__}._core")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


def load(name):
    """Import a specific backend module by name."""
    module = {"cython": "_core", "python": "_core_py"}[name]
    return importlib.import_module(f"{__package__}.{module}")
