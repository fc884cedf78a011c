# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of projfree._kernel_py for domains with closed-form LOs.

Kind codes: 0 = ball(radius), 1 = box(lower, upper), 2 = corner simplex.
Loop structure and status codes mirror the pure-numpy reference exactly.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

STOP_CLOSE = 0
STOP_SEPARATED = 1
STATUS_OK = 0
STATUS_FW_BUDGET = 1
STATUS_PULL_BUDGET = 2

cdef int _STOP_CLOSE = 0
cdef int _STOP_SEPARATED = 1
cdef int _STATUS_OK = 0
cdef int _STATUS_FW_BUDGET = 1
cdef int _STATUS_PULL_BUDGET = 2


cdef inline double _dot(double[::1] a, double[::1] b) noexcept nogil:
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0
    for i in range(n):
        s += a[i] * b[i]
    return s


cdef inline void _lo(int kind, double radius, double[::1] lower,
                     double[::1] upper, double[::1] g, double[::1] v) noexcept nogil:
    cdef Py_ssize_t i, j, n = g.shape[0]
    cdef double nrm, gmin
    if kind == 0:  # ball
        nrm = sqrt(_dot(g, g))
        if nrm == 0.0:
            for i in range(n):
                v[i] = 0.0
        else:
            for i in range(n):
                v[i] = -radius * g[i] / nrm
    elif kind == 1:  # box
        for i in range(n):
            v[i] = upper[i] if g[i] < 0.0 else lower[i]
    else:  # corner simplex
        j = 0
        gmin = g[0]
        for i in range(1, n):
            if g[i] < gmin:
                gmin = g[i]
                j = i
        for i in range(n):
            v[i] = 0.0
        if gmin < 0.0:
            v[j] = 1.0


cdef long long _fw_loop(int kind, double radius, double[::1] lower,
                        double[::1] upper, double[::1] x, double[::1] y,
                        double eps, long long cap, double[::1] g,
                        double[::1] v, long long* lo_calls,
                        int* stop_code) noexcept nogil:
    """Runs FW in place on x; returns iterations, sets stop_code/-1."""
    cdef Py_ssize_t i, n = x.shape[0]
    cdef long long iters = 0
    cdef double thresh = 3.0 * eps
    cdef double dist2, gap, dd, step
    stop_code[0] = -1
    while iters < cap:
        iters += 1
        dist2 = 0.0
        for i in range(n):
            g[i] = x[i] - y[i]
            dist2 += g[i] * g[i]
        if dist2 <= thresh:
            stop_code[0] = _STOP_CLOSE
            return iters
        _lo(kind, radius, lower, upper, g, v)
        lo_calls[0] += 1
        gap = 0.0
        dd = 0.0
        for i in range(n):
            v[i] = x[i] - v[i]  # reuse as d = x - v
            gap += g[i] * v[i]
            dd += v[i] * v[i]
        if gap <= eps:
            stop_code[0] = _STOP_SEPARATED
            return iters
        step = 0.0 if dd == 0.0 else gap / dd
        if step > 1.0:
            step = 1.0
        elif step < 0.0:
            step = 0.0
        for i in range(n):
            x[i] -= step * v[i]
    return iters


def fw_approach(int kind, double radius, cnp.ndarray lower_arr,
                cnp.ndarray upper_arr, cnp.ndarray x_init,
                cnp.ndarray target, double eps, long long cap):
    """Returns (x, stop_code_or_-1, iterations, lo_calls)."""
    x_np = np.array(x_init, dtype=np.float64)
    y_np = np.ascontiguousarray(target, dtype=np.float64)
    cdef double[::1] x = x_np
    cdef double[::1] y = y_np
    cdef double[::1] lower = np.ascontiguousarray(lower_arr, dtype=np.float64)
    cdef double[::1] upper = np.ascontiguousarray(upper_arr, dtype=np.float64)
    cdef double[::1] g = np.empty(x_np.shape[0])
    cdef double[::1] v = np.empty(x_np.shape[0])
    cdef long long lo_calls = 0
    cdef int stop_code = -1
    cdef long long iters
    with nogil:
        iters = _fw_loop(kind, radius, lower, upper, x, y, eps, cap,
                         g, v, &lo_calls, &stop_code)
    return x_np, stop_code, iters, lo_calls


def pull_loop(int kind, double radius, cnp.ndarray lower_arr,
              cnp.ndarray upper_arr, cnp.ndarray x0, cnp.ndarray y1,
              double eps, double gamma, long long fw_cap,
              long long pull_cap):
    """Returns (x, y, fw_total, fw_max, pull_iters, lo_calls, status)."""
    x_np = np.array(x0, dtype=np.float64)
    y_np = np.array(y1, dtype=np.float64)
    cdef double[::1] x = x_np
    cdef double[::1] y = y_np
    cdef double[::1] lower = np.ascontiguousarray(lower_arr, dtype=np.float64)
    cdef double[::1] upper = np.ascontiguousarray(upper_arr, dtype=np.float64)
    cdef double[::1] g = np.empty(x_np.shape[0])
    cdef double[::1] v = np.empty(x_np.shape[0])
    cdef long long fw_total = 0, fw_max = 0, pulls = 0, lo_calls = 0, fi
    cdef int stop_code = -1
    cdef int status = _STATUS_PULL_BUDGET
    cdef Py_ssize_t i, n = x_np.shape[0]
    with nogil:
        while pulls < pull_cap:
            pulls += 1
            fi = _fw_loop(kind, radius, lower, upper, x, y, eps, fw_cap,
                          g, v, &lo_calls, &stop_code)
            fw_total += fi
            if fi > fw_max:
                fw_max = fi
            if stop_code == -1:
                status = _STATUS_FW_BUDGET
                break
            if stop_code == _STOP_CLOSE:
                status = _STATUS_OK
                break
            for i in range(n):
                y[i] -= gamma * (y[i] - x[i])
    return x_np, y_np, fw_total, fw_max, pulls, lo_calls, status
