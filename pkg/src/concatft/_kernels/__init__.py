"""Tape runners: the compiled extension when available, else pure Python.

Set ``CONCATFT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _frame_py

BACKEND = "python"
run_batch = _frame_py.run_batch

if not os.environ.get("CONCATFT_PURE_PYTHON"):
    try:
        from . import _frame
    except ImportError:  # extension not built
        _frame = None
    else:
        BACKEND = "cython"
        run_batch = _frame.run_batch

run_batch_python = _frame_py.run_batch
