# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory kernels for the rigid-body composition methods.

Each step is a fixed sequence of planar rotations; the loops below keep
the three momentum components in C doubles and only touch Python when a
sample row is recorded.  `_fallback` mirrors this module operation for
operation.
"""

from libc.math cimport cos, sin
from libc.stdint cimport int64_t

import numpy as np


cdef inline void _apply_axis(double* m, int axis, double angle) noexcept nogil:
    cdef double c = cos(angle)
    cdef double s = sin(angle)
    cdef double u
    cdef double v
    if axis == 1:
        u = m[1]; v = m[2]
        m[1] = c * u + s * v
        m[2] = -s * u + c * v
    elif axis == 2:
        u = m[0]; v = m[2]
        m[0] = c * u - s * v
        m[2] = s * u + c * v
    else:
        u = m[0]; v = m[1]
        m[0] = c * u + s * v
        m[1] = -s * u + c * v


def run_composition(double m1, double m2, double m3, double h, int64_t steps,
                    double inv_i1, double inv_i3,
                    int64_t[::1] axes, double[::1] coeffs, int64_t sample_every):
    """Advance `steps` composition steps, sampling every `sample_every` steps.

    Each step applies the rotations listed in `axes`/`coeffs` in order,
    with the angle read from the current state.  Row 0 of the result is
    the initial state.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    if axes.shape[0] != coeffs.shape[0]:
        raise ValueError("axes and coeffs must have equal length")
    cdef int64_t nsub = axes.shape[0]
    cdef int64_t nrows = steps // sample_every + 1
    out = np.empty((nrows, 3), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef double m[3]
    cdef int64_t n, k, row
    cdef int axis
    cdef double rate
    m[0] = m1; m[1] = m2; m[2] = m3
    ov[0, 0] = m[0]; ov[0, 1] = m[1]; ov[0, 2] = m[2]
    row = 1
    with nogil:
        for n in range(1, steps + 1):
            for k in range(nsub):
                axis = <int> axes[k]
                rate = inv_i3 if axis == 3 else inv_i1
                _apply_axis(m, axis, coeffs[k] * h * m[axis - 1] * rate)
            if n % sample_every == 0:
                ov[row, 0] = m[0]; ov[row, 1] = m[1]; ov[row, 2] = m[2]
                row += 1
    return out


def run_frozen(double m1, double m2, double m3, double h, int64_t steps,
               double inv_i1, double inv_i3, int64_t sample_every):
    """Frozen-angle variant: all three rotation angles are read at the start
    of each step and applied as the stacked product (axis 3, then 2, then 1)."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    cdef int64_t nrows = steps // sample_every + 1
    out = np.empty((nrows, 3), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef double m[3]
    cdef int64_t n, row
    cdef double a1, a2, a3
    m[0] = m1; m[1] = m2; m[2] = m3
    ov[0, 0] = m[0]; ov[0, 1] = m[1]; ov[0, 2] = m[2]
    row = 1
    with nogil:
        for n in range(1, steps + 1):
            a1 = h * m[0] * inv_i1
            a2 = h * m[1] * inv_i1
            a3 = h * m[2] * inv_i3
            _apply_axis(m, 3, a3)
            _apply_axis(m, 2, a2)
            _apply_axis(m, 1, a1)
            if n % sample_every == 0:
                ov[row, 0] = m[0]; ov[row, 1] = m[1]; ov[row, 2] = m[2]
                row += 1
    return out
