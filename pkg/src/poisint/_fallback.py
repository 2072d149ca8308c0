"""Pure-Python twin of the compiled trajectory kernels in ``_speedups``.

Same signatures, same arithmetic, same operation order; used when the
extension is not built.  Keep the two modules in lockstep.
"""

from math import cos, sin

import numpy as np


def _apply_axis(m, axis, angle):
    c = cos(angle)
    s = sin(angle)
    if axis == 1:
        u, v = m[1], m[2]
        m[1] = c * u + s * v
        m[2] = -s * u + c * v
    elif axis == 2:
        u, v = m[0], m[2]
        m[0] = c * u - s * v
        m[2] = s * u + c * v
    else:
        u, v = m[0], m[1]
        m[0] = c * u + s * v
        m[1] = -s * u + c * v


def run_composition(m1, m2, m3, h, steps, inv_i1, inv_i3, axes, coeffs, sample_every):
    """Advance `steps` composition steps, sampling every `sample_every` steps.

    Each step applies the rotations listed in `axes`/`coeffs` in order,
    with the angle read from the current state.  Row 0 of the result is
    the initial state.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    if len(axes) != len(coeffs):
        raise ValueError("axes and coeffs must have equal length")
    substeps = [(int(a), float(c)) for a, c in zip(axes, coeffs)]
    out = np.empty((steps // sample_every + 1, 3), dtype=np.float64)
    m = [float(m1), float(m2), float(m3)]
    out[0] = m
    row = 1
    for n in range(1, steps + 1):
        for axis, coeff in substeps:
            rate = inv_i3 if axis == 3 else inv_i1
            _apply_axis(m, axis, coeff * h * m[axis - 1] * rate)
        if n % sample_every == 0:
            out[row] = m
            row += 1
    return out


def run_frozen(m1, m2, m3, h, steps, inv_i1, inv_i3, sample_every):
    """Frozen-angle variant: all three rotation angles are read at the start
    of each step and applied as the stacked product (axis 3, then 2, then 1)."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    out = np.empty((steps // sample_every + 1, 3), dtype=np.float64)
    m = [float(m1), float(m2), float(m3)]
    out[0] = m
    row = 1
    for n in range(1, steps + 1):
        a1 = h * m[0] * inv_i1
        a2 = h * m[1] * inv_i1
        a3 = h * m[2] * inv_i3
        _apply_axis(m, 3, a3)
        _apply_axis(m, 2, a2)
        _apply_axis(m, 1, a1)
        if n % sample_every == 0:
            out[row] = m
            row += 1
    return out
