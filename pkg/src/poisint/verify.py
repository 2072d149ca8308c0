"""Numerical certification of structural claims about one-step maps.

The residuals here measure, through finite-difference Jacobians, whether a
map transports the structure matrix correctly (Poisson property), whether
a planar map preserves the area form, how conserved quantities drift along
discrete trajectories, and at what rate global errors shrink with the step
size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .poisson import (
    Array,
    PoissonSystem,
    as_scalar_field,
    as_state,
    structure_matrix,
)

#: Default step for finite-difference Jacobians of one-step maps.
DEFAULT_FD_EPS = 1e-6

#: Errors at or below this level count as "the map reproduces the oracle".
EXACTNESS_FLOOR = 1e-12


@dataclass(frozen=True)
class OneStepMap:
    """Discrete one-step update (x, h) -> x'."""

    dimension: int
    apply: Callable[[Array, float], Array]


def _apply_of(mapping):
    if isinstance(mapping, OneStepMap):
        return mapping.apply
    if callable(mapping):
        return mapping
    raise TypeError(f"expected a OneStepMap or a callable, got {type(mapping).__name__}")


class BlowUpError(RuntimeError):
    """A trajectory produced non-finite values; carries the offending step index."""

    def __init__(self, step: int):
        super().__init__(f"non-finite state at step {step}")
        self.step = step


def fd_jacobian(mapping, x, h: float, fd_eps: float = DEFAULT_FD_EPS) -> Array:
    """Central-difference Jacobian of y -> map(y, h) at x."""
    if fd_eps <= 0.0:
        raise ValueError("fd_eps must be positive")
    apply = _apply_of(mapping)
    x = np.asarray(x, dtype=float)
    n = x.size
    jac = np.empty((n, n))
    for j in range(n):
        xp = x.copy()
        xm = x.copy()
        xp[j] += fd_eps
        xm[j] -= fd_eps
        jac[:, j] = (np.asarray(apply(xp, h), dtype=float) - np.asarray(apply(xm, h), dtype=float)) / (
            2.0 * fd_eps
        )
    if not np.isfinite(jac).all():
        raise ValueError("finite-difference Jacobian has non-finite entries")
    return jac


def poisson_residual(system: PoissonSystem, mapping, x, h: float, fd_eps: float = DEFAULT_FD_EPS) -> float:
    """Max-norm defect of D Pi(x) D^T = Pi(map(x, h)) with D the FD Jacobian.

    Zero (up to differencing noise) exactly when the map transports the
    structure matrix, i.e. preserves the bracket.
    """
    x = as_state(x, system.dimension)
    apply = _apply_of(mapping)
    jac = fd_jacobian(apply, x, h, fd_eps)
    pi_x = structure_matrix(system, x)
    y = as_state(apply(x, h), system.dimension)
    pi_y = structure_matrix(system, y)
    return float(np.max(np.abs(jac @ pi_x @ jac.T - pi_y)))


def symplectic_residual_2d(mapping, x, h: float, fd_eps: float = DEFAULT_FD_EPS) -> float:
    """|det(D) - 1| of the FD Jacobian; the area-form defect of a planar map."""
    x = as_state(x)
    if x.size != 2:
        raise ValueError("the planar symplectic residual needs dimension 2")
    jac = fd_jacobian(mapping, x, h, fd_eps)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    return abs(det - 1.0)


@dataclass(frozen=True)
class DriftReport:
    """Deviation samples (step, t, observable(x_n) - observable(x_0)) along a trajectory."""

    samples: tuple
    max_abs_deviation: float
    final_deviation: float


def drift(mapping, observable, x0, h: float, steps: int) -> DriftReport:
    """Iterate the map for `steps` steps, recording the observable's deviation each step."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    apply = _apply_of(mapping)
    obs = as_scalar_field(observable).eval
    x = as_state(x0)
    value0 = float(obs(x))
    samples = [(0, 0.0, 0.0)]
    max_dev = 0.0
    dev = 0.0
    for n in range(1, steps + 1):
        x = np.asarray(apply(x, h), dtype=float)
        if not np.isfinite(x).all():
            raise BlowUpError(n)
        dev = float(obs(x)) - value0
        samples.append((n, n * h, dev))
        max_dev = max(max_dev, abs(dev))
    return DriftReport(samples=tuple(samples), max_abs_deviation=max_dev, final_deviation=dev)


@dataclass(frozen=True)
class OrderEstimate:
    """Global errors per step size and the fitted log-log slope."""

    h_values: tuple
    errors: tuple
    slope: float


def convergence_order(mapping, oracle, x0, T: float, h_values: Sequence[float]) -> OrderEstimate:
    """Global error against an exact oracle at time T for each h.

    Every h must divide T up to rounding of the step count.  The slope is
    a least-squares fit of log(error) against log(h); when all errors sit
    at roundoff level the slope is reported as the +inf exactness
    sentinel.
    """
    apply = _apply_of(mapping)
    x0 = as_state(x0)
    hs = [float(h) for h in h_values]
    if len(hs) < 3:
        raise ValueError("need at least three step sizes for an order fit")
    if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise ValueError("step sizes must be strictly decreasing")
    target = np.asarray(oracle(x0, T), dtype=float)
    errors = []
    for h in hs:
        n = round(T / h)
        if n < 1 or abs(n * h - T) > 1e-12 * max(1.0, abs(T)):
            raise ValueError(f"step size {h} does not divide the horizon {T}")
        x = x0
        for k in range(n):
            x = np.asarray(apply(x, h), dtype=float)
            if not np.isfinite(x).all():
                raise BlowUpError(k + 1)
        errors.append(float(np.max(np.abs(x - target))))
    if max(errors) <= EXACTNESS_FLOOR or min(errors) == 0.0:
        slope = math.inf
    else:
        slope = float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
    return OrderEstimate(h_values=tuple(hs), errors=tuple(errors), slope=slope)


def rk1_poisson_condition(A: float, B: float, a: float, b: float) -> Optional[float]:
    """Step size 1/(2bA - aA) singled out for the one-stage method on the
    affine-bracket plane; None when the denominator vanishes."""
    denom = 2.0 * b * A - a * A
    if denom == 0.0:
        return None
    return 1.0 / denom


def affine_plane_system(A: float, B: float, C: float = 0.0) -> PoissonSystem:
    """Planar system with bracket {x1, x2} = x2 and Hamiltonian A x1 + B x2 + C."""
    return PoissonSystem(
        dimension=2,
        structure=lambda x: np.array([[0.0, x[1]], [-x[1], 0.0]]),
        hamiltonian=lambda x: A * x[0] + B * x[1] + C,
        hamiltonian_gradient=lambda x: np.array([A, B]),
    )


def sample_states(rng: np.random.Generator, count: int, dimension: int,
                  radius_range: Optional[tuple] = None, box: float = 1.0) -> Array:
    """Deterministic test states: radii in `radius_range` on random directions,
    or uniform in [-box, box]^dimension when no range is given."""
    if radius_range is not None:
        lo, hi = radius_range
        directions = rng.normal(size=(count, dimension))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        norms[norms < 1e-12] = 1.0
        radii = rng.uniform(lo, hi, size=(count, 1))
        return directions / norms * radii
    return rng.uniform(-box, box, size=(count, dimension))
