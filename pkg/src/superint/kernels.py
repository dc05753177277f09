"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``SUPERINT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels as python

compiled = None
if not os.environ.get("SUPERINT_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

BACKEND = "compiled" if compiled is not None else "python"
_impl = compiled if compiled is not None else python


def _pick(name):
    fn = getattr(_impl, name, None)
    return fn if fn is not None else getattr(python, name)


_compiled_extend = _pick("extend_extensions")

# below one machine word the conversion into C buffers costs more than it saves
SMALL_FRAME = 64


def extend_extensions(todo, ext, frame, valuation):
    if frame.size <= SMALL_FRAME:
        return python.extend_extensions(todo, ext, frame, valuation)
    return _compiled_extend(todo, ext, frame, valuation)


formula_bounds = _pick("formula_bounds")
compile_formula = python.compile_formula
Program = python.Program
