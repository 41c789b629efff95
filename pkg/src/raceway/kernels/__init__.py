"""Hot integration kernels with a compiled core and a pure-Python fallback.

The Cython extension `_heun` is preferred when built; `_heun_py` carries the
same contracts in numpy. Set RACEWAY_PURE_PYTHON=1 to force the fallback
(used by the cross-check tests and the benchmark).
"""

import os

if os.environ.get("RACEWAY_PURE_PYTHON") == "1":
    from . import _heun_py as _impl
else:
    try:
        from . import _heun as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _heun_py as _impl

BACKEND = _impl.BACKEND
forward_sweep = _impl.forward_sweep
adjoint_sweep = _impl.adjoint_sweep

__all__ = ["BACKEND", "forward_sweep", "adjoint_sweep"]
