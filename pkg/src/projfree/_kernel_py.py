"""Pure-numpy inner loops of the infeasible-projection oracle.

These are the reference implementations; `projfree._fwkernel` is the
compiled twin (same loop structure, closed-form LOs inlined) selected
at import by `projfree.kernels` when available.

Status codes are returned instead of raising so both backends share the
caller-side error handling in `projfree.oracle`.
"""

import numpy as np

STOP_CLOSE = 0
STOP_SEPARATED = 1
STATUS_OK = 0
STATUS_FW_BUDGET = 1
STATUS_PULL_BUDGET = 2


def fw_approach(lo_fn, x_init, target, eps, cap):
    """Line-search Frank-Wolfe on f(x) = 0.5 ||x - target||^2 over K.

    Stops once ||x - target||^2 <= 3*eps (code STOP_CLOSE) or the FW gap
    <x - target, x - v> drops to eps (code STOP_SEPARATED). The cheap
    distance condition is tested before paying for an LO call.

    Returns (x, stop_code_or_-1, iterations, lo_calls); -1 means the
    iteration cap was hit with neither condition fired.
    """
    x = np.array(x_init, dtype=np.float64, copy=True)
    y = np.asarray(target, dtype=np.float64)
    thresh = 3.0 * eps
    iters = 0
    lo_calls = 0
    while iters < cap:
        iters += 1
        g = x - y
        if float(g @ g) <= thresh:
            return x, STOP_CLOSE, iters, lo_calls
        v = lo_fn(g)
        lo_calls += 1
        d = x - v
        gap = float(g @ d)
        if gap <= eps:
            return x, STOP_SEPARATED, iters, lo_calls
        dd = float(d @ d)
        step = 0.0 if dd == 0.0 else gap / dd
        step = min(1.0, max(0.0, step))
        x = x - step * d
    return x, -1, iters, lo_calls


def pull_loop(lo_fn, x0, y1, eps, gamma, fw_cap, pull_cap):
    """Alternate FW approach steps with pulls of y toward the feasible x.

    `y1` must already be clipped into the enclosing ball and satisfy
    ||x0 - y1||^2 > 3*eps (the caller handles the short-circuit), and
    `gamma` is fixed from that initial distance.

    Returns (x, y, fw_total, fw_max, pull_iters, lo_calls, status).
    """
    x = np.array(x0, dtype=np.float64, copy=True)
    y = np.array(y1, dtype=np.float64, copy=True)
    fw_total = 0
    fw_max = 0
    lo_calls = 0
    pulls = 0
    while pulls < pull_cap:
        pulls += 1
        x, code, fi, li = fw_approach(lo_fn, x, y, eps, fw_cap)
        fw_total += fi
        fw_max = max(fw_max, fi)
        lo_calls += li
        if code == -1:
            return x, y, fw_total, fw_max, pulls, lo_calls, STATUS_FW_BUDGET
        if code == STOP_CLOSE:
            return x, y, fw_total, fw_max, pulls, lo_calls, STATUS_OK
        y = y - gamma * (y - x)
    return x, y, fw_total, fw_max, pulls, lo_calls, STATUS_PULL_BUDGET
