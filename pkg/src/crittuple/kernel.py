"""Kernel backend selection.

The hot search loops exist twice: a Cython extension (``_kernel``) and a
pure-Python twin (``_kernel_py``).  The compiled one is preferred when it
imported cleanly; set ``CRITTUPLE_PURE_PYTHON=1`` to force the fallback.
``use()`` switches backends temporarily (benchmarks, parity tests).
"""

import os
from contextlib import contextmanager

from . import _kernel_py as _pure

try:
    from . import _kernel as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

if os.environ.get("CRITTUPLE_PURE_PYTHON") == "1" or _compiled is None:
    _active = _pure
else:
    _active = _compiled


def get():
    return _active


def backend_name() -> str:
    return _active.BACKEND


def available_backends() -> list[str]:
    out = ["python"]
    if _compiled is not None:
        out.insert(0, "compiled")
    return out


def backend_module(name: str):
    if name == "python":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


@contextmanager
def use(name: str):
    global _active
    prev = _active
    _active = backend_module(name)
    try:
        yield _active
    finally:
        _active = prev
