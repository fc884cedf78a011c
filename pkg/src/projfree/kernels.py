"""Backend selection for the oracle inner loops.

The compiled kernel handles ball/box/simplex (closed-form LOs); every
other domain, and every domain when the extension is unavailable or
``PROJFREE_PURE_PYTHON=1`` is set, runs the pure-numpy reference loops
through the domain's ``linear_minimize``.
"""

import os

import numpy as np

from . import _kernel_py

_EMPTY = np.empty(0)
_KIND_CODES = {"ball": 0, "box": 1, "simplex": 2}

if os.environ.get("PROJFREE_PURE_PYTHON", "0") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _fwkernel as _compiled
    except ImportError:
        _compiled = None

STOP_CLOSE = _kernel_py.STOP_CLOSE
STOP_SEPARATED = _kernel_py.STOP_SEPARATED
STATUS_OK = _kernel_py.STATUS_OK
STATUS_FW_BUDGET = _kernel_py.STATUS_FW_BUDGET
STATUS_PULL_BUDGET = _kernel_py.STATUS_PULL_BUDGET


def backend_name() -> str:
    return "compiled" if _compiled is not None else "python"


def has_compiled() -> bool:
    return _compiled is not None


def _compiled_args(domain):
    code = _KIND_CODES.get(domain.kind)
    if _compiled is None or code is None:
        return None
    if domain.kind == "box":
        return code, domain.radius, domain.lower, domain.upper
    return code, domain.radius, _EMPTY, _EMPTY


def fw_approach(domain, x_init, target, eps, cap):
    """Dispatching twin of _kernel_py.fw_approach."""
    args = _compiled_args(domain)
    if args is not None:
        return _compiled.fw_approach(*args, x_init, target, eps, cap)
    return _kernel_py.fw_approach(domain.linear_minimize, x_init, target,
                                  eps, cap)


def pull_loop(domain, x0, y1, eps, gamma, fw_cap, pull_cap):
    """Dispatching twin of _kernel_py.pull_loop."""
    args = _compiled_args(domain)
    if args is not None:
        return _compiled.pull_loop(*args, x0, y1, eps, gamma, fw_cap,
                                   pull_cap)
    return _kernel_py.pull_loop(domain.linear_minimize, x0, y1, eps, gamma,
                                fw_cap, pull_cap)
