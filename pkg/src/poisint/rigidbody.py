"""Symmetric free rigid body on R^3: momentum dynamics, exact axis flows, composition steps.

States are angular momentum vectors m = (m1, m2, m3).  With two equal
transverse inertia moments I1 and a smaller axial moment I3, the dynamics

    m1' = a1 m2 m3,  m2' = -a1 m1 m3,  m3' = 0,  a1 = 1/I3 - 1/I1 > 0

rotates (m1, m2) at the constant rate a1 m3.  The quadratic Hamiltonian
splits into three single-axis terms whose exact flows are planar
rotations; composing them gives explicit structure-preserving one-step
methods that conserve |m| exactly.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import List

import numpy as np

from . import _backend
from .poisson import Array, PoissonSystem, ScalarField, as_state
from .splitting import (
    ExactFlow,
    SplitScheme,
    composition_coefficients,
    lie_trotter_step,
    strang_step,
    yoshida_step,
)
from .verify import OneStepMap

_YOSHIDA_RE = re.compile(r"^yoshida(\d+)?$")

#: Composition method names accepted by `evolve` and `one_step_map`.
COMPOSITION_METHODS = ("lie_trotter", "lie_trotter_frozen", "strang", "yoshida<order>")


@dataclass(frozen=True)
class RigidBodyParams:
    """Principal inertia moments; the transverse pair I1 exceeds the axial I3."""

    I1: float
    I3: float

    def __post_init__(self):
        if not (math.isfinite(self.I1) and math.isfinite(self.I3)):
            raise ValueError("inertia moments must be finite")
        if not self.I1 > self.I3 > 0.0:
            raise ValueError("inertia moments must satisfy I1 > I3 > 0")


def coefficient_a1(params: RigidBodyParams) -> float:
    """Spin-rate coefficient 1/I3 - 1/I1, strictly positive."""
    return 1.0 / params.I3 - 1.0 / params.I1


def euler_rhs(params: RigidBodyParams, m) -> Array:
    """(a1 m2 m3, -a1 m1 m3, 0)."""
    m = as_state(m, 3)
    a1 = coefficient_a1(params)
    return np.array([a1 * m[1] * m[2], -a1 * m[0] * m[2], 0.0])


def hamiltonian(params: RigidBodyParams, m) -> float:
    """(m1^2/I1 + m2^2/I1 + m3^2/I3) / 2."""
    m = as_state(m, 3)
    return 0.5 * (m[0] ** 2 / params.I1 + m[1] ** 2 / params.I1 + m[2] ** 2 / params.I3)


def hamiltonian_gradient(params: RigidBodyParams, m) -> Array:
    m = as_state(m, 3)
    return np.array([m[0] / params.I1, m[1] / params.I1, m[2] / params.I3])


def casimir(m) -> float:
    """|m|^2 / 2, constant on every sphere around the origin."""
    m = as_state(m, 3)
    return 0.5 * float(m @ m)


def casimir_gradient(m) -> Array:
    return as_state(m, 3).copy()


def hat(m) -> Array:
    """Structure matrix [[0, -m3, m2], [m3, 0, -m1], [-m2, m1, 0]]."""
    m = as_state(m, 3)
    return np.array(
        [
            [0.0, -m[2], m[1]],
            [m[2], 0.0, -m[0]],
            [-m[1], m[0], 0.0],
        ]
    )


def flow_axis1(params: RigidBodyParams, m, t: float) -> Array:
    """Exact flow of the m1 spin term: (m2, m3) rotates by (m1/I1) t, m1 fixed."""
    m = as_state(m, 3)
    theta = m[0] / params.I1 * t
    c, s = math.cos(theta), math.sin(theta)
    return np.array([m[0], c * m[1] + s * m[2], -s * m[1] + c * m[2]])


def flow_axis2(params: RigidBodyParams, m, t: float) -> Array:
    """Exact flow of the m2 spin term: (m1, m3) rotates by (m2/I1) t, m2 fixed."""
    m = as_state(m, 3)
    theta = m[1] / params.I1 * t
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * m[0] - s * m[2], m[1], s * m[0] + c * m[2]])


def flow_axis3(params: RigidBodyParams, m, t: float) -> Array:
    """Exact flow of the m3 spin term: (m1, m2) rotates by (m3/I3) t, m3 fixed."""
    m = as_state(m, 3)
    theta = m[2] / params.I3 * t
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * m[0] + s * m[1], -s * m[0] + c * m[1], m[2]])


def split_scheme(params: RigidBodyParams) -> SplitScheme:
    """Three-term splitting into the exact axis flows, in axis order."""
    return SplitScheme(
        flows=(
            ExactFlow(3, lambda m, t: flow_axis1(params, m, t)),
            ExactFlow(3, lambda m, t: flow_axis2(params, m, t)),
            ExactFlow(3, lambda m, t: flow_axis3(params, m, t)),
        )
    )


def poisson_system(params: RigidBodyParams) -> PoissonSystem:
    """The momentum-space Poisson structure with this body's Hamiltonian and the norm Casimir."""
    return PoissonSystem(
        dimension=3,
        structure=hat,
        hamiltonian=lambda m: hamiltonian(params, m),
        hamiltonian_gradient=lambda m: hamiltonian_gradient(params, m),
        casimirs=(ScalarField(eval=casimir, gradient=casimir_gradient),),
    )


def _axis1_matrix(theta: float) -> Array:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def _axis2_matrix(theta: float) -> Array:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


def _axis3_matrix(theta: float) -> Array:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class StepPropagator:
    """Axis rotation factors M (axis 1), N (axis 2), P (axis 3) and their product R = M N P."""

    M: Array
    N: Array
    P: Array
    R: Array


def step_propagator(params: RigidBodyParams, m, h: float) -> StepPropagator:
    """Rotation factors for one step with all three angles read at the given state."""
    m = as_state(m, 3)
    M = _axis1_matrix(h * m[0] / params.I1)
    N = _axis2_matrix(h * m[1] / params.I1)
    P = _axis3_matrix(h * m[2] / params.I3)
    return StepPropagator(M=M, N=N, P=P, R=M @ N @ P)


def lie_trotter_rigid_step(params: RigidBodyParams, m, h: float, frozen: bool = False) -> Array:
    """One first-order composition step.

    The default applies the three axis flows in sequence, each rotation
    angle read from the current intermediate state, which makes the step a
    composition of exact flows.  With frozen=True all three angles are
    evaluated at the input state and the stacked rotation R = M N P is
    applied instead.  Both variants are products of rotations and preserve
    |m| exactly.
    """
    m = as_state(m, 3)
    if frozen:
        return step_propagator(params, m, h).R @ m
    m = flow_axis1(params, m, h)
    m = flow_axis2(params, m, h)
    return flow_axis3(params, m, h)


def _det3(R: Array) -> float:
    return float(
        R[0, 0] * (R[1, 1] * R[2, 2] - R[1, 2] * R[2, 1])
        - R[0, 1] * (R[1, 0] * R[2, 2] - R[1, 2] * R[2, 0])
        + R[0, 2] * (R[1, 0] * R[2, 1] - R[1, 1] * R[2, 0])
    )


def _cubic_roots(a2: float, a1: float, a0: float) -> List[complex]:
    """Roots of x^3 + a2 x^2 + a1 x + a0, closed form plus Newton polish."""
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    shift = -a2 / 3.0
    if abs(p) < 1e-14 and abs(q) < 1e-14:
        ys = [0.0, 0.0, 0.0]
    else:
        disc = (0.5 * q) ** 2 + (p / 3.0) ** 3
        if disc > 0.0:
            sq = math.sqrt(disc)
            u = math.copysign(abs(-0.5 * q + sq) ** (1.0 / 3.0), -0.5 * q + sq)
            v = math.copysign(abs(-0.5 * q - sq) ** (1.0 / 3.0), -0.5 * q - sq)
            imag = 0.5 * math.sqrt(3.0) * (u - v)
            ys = [u + v, complex(-0.5 * (u + v), imag), complex(-0.5 * (u + v), -imag)]
        else:
            r = 2.0 * math.sqrt(-p / 3.0)
            t = 3.0 * q / (p * r)
            t = min(1.0, max(-1.0, t))
            phi = math.acos(t) / 3.0
            ys = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
    roots = [complex(y) + shift for y in ys]

    def poly(z):
        return ((z + a2) * z + a1) * z + a0

    def dpoly(z):
        return (3.0 * z + 2.0 * a2) * z + a1

    polished = []
    for z in roots:
        for _ in range(3):
            d = dpoly(z)
            if abs(d) < 1e-12:
                break
            z = z - poly(z) / d
        polished.append(z)
    return polished


def characteristic_roots(prop) -> List[complex]:
    """Eigenvalues of the one-step propagator R = M N P, sorted by complex argument.

    Computed from the closed-form characteristic cubic; if that fails the
    roots fall back to the orthogonal-matrix spectrum {1, exp(+-i theta)}
    with 2 cos(theta) = trace - 1.
    """
    R = np.asarray(prop.R if hasattr(prop, "R") else prop, dtype=float)
    if R.shape != (3, 3):
        raise ValueError("propagator must be a 3 x 3 matrix")
    trace = float(np.trace(R))
    minors = float(
        (R[0, 0] * R[1, 1] - R[0, 1] * R[1, 0])
        + (R[0, 0] * R[2, 2] - R[0, 2] * R[2, 0])
        + (R[1, 1] * R[2, 2] - R[1, 2] * R[2, 1])
    )
    roots = _cubic_roots(-trace, minors, -_det3(R))
    if not all(cmath.isfinite(z) for z in roots):
        c = min(1.0, max(-1.0, 0.5 * (trace - 1.0)))
        theta = math.acos(c)
        roots = [complex(1.0), cmath.exp(1j * theta), cmath.exp(-1j * theta)]
    return sorted(roots, key=cmath.phase)


def exact_solution(params: RigidBodyParams, m0, t: float) -> Array:
    """Closed-form solution: (m1, m2) rotates by a1 m3(0) t, m3 stays put."""
    m0 = as_state(m0, 3)
    omega = coefficient_a1(params) * m0[2]
    c, s = math.cos(omega * t), math.sin(omega * t)
    return np.array([c * m0[0] + s * m0[1], -s * m0[0] + c * m0[1], m0[2]])


def orbit_of(m) -> float:
    """Radius |m| of the momentum sphere through m."""
    m = as_state(m, 3)
    return float(np.linalg.norm(m))


def kks_form(m, u, v) -> float:
    """Orbit symplectic two-form at m evaluated on tangent vectors u, v.

    (1/k) (m2 (u1 v3 - u3 v1) - m3 (u1 v2 - u2 v1) - m1 (u2 v3 - u3 v2))
    with k = |m|.  Both arguments must be tangent to the sphere at m.
    """
    m = as_state(m, 3)
    u = as_state(u, 3)
    v = as_state(v, 3)
    k = float(np.linalg.norm(m))
    if k == 0.0:
        raise ValueError("the origin lies on no momentum sphere")
    if abs(float(u @ m)) > 1e-10 or abs(float(v @ m)) > 1e-10:
        raise ValueError("u and v must be tangent to the sphere at m")
    return (
        m[1] * (u[0] * v[2] - u[2] * v[0])
        - m[2] * (u[0] * v[1] - u[1] * v[0])
        - m[0] * (u[1] * v[2] - u[2] * v[1])
    ) / k


def _composition_table(method: str):
    """Expand a composition method into per-step (axis, coefficient) arrays."""
    if method == "lie_trotter":
        return np.array([1, 2, 3], dtype=np.int64), np.ones(3)
    if method == "strang":
        return (
            np.array([1, 2, 3, 2, 1], dtype=np.int64),
            np.array([0.5, 0.5, 1.0, 0.5, 0.5]),
        )
    match = _YOSHIDA_RE.match(method)
    if match:
        order = int(match.group(1) or 4)
        if order < 4 or order % 2:
            raise ValueError("composition order must be an even integer >= 4")
        axes, coeffs = _composition_table("strang")
        for target in range(4, order + 1, 2):
            w = composition_coefficients((target - 2) // 2)
            axes = np.concatenate([axes, axes, axes])
            coeffs = np.concatenate([w.x1 * coeffs, w.x0 * coeffs, w.x1 * coeffs])
        return axes, coeffs
    raise ValueError(f"unknown composition method {method!r}")


def evolve(
    params: RigidBodyParams,
    m0,
    h: float,
    steps: int,
    method: str = "lie_trotter",
    sample_every: int = 1,
) -> Array:
    """Run `steps` composition steps through the trajectory kernel.

    Returns the states sampled every `sample_every` steps as an array of
    shape (steps // sample_every + 1, 3); row 0 is the initial state.
    """
    m0 = as_state(m0, 3)
    if not math.isfinite(h):
        raise ValueError("step size must be finite")
    inv1, inv3 = 1.0 / params.I1, 1.0 / params.I3
    if method == "lie_trotter_frozen":
        return _backend.run_frozen(m0[0], m0[1], m0[2], h, int(steps), inv1, inv3, int(sample_every))
    axes, coeffs = _composition_table(method)
    return _backend.run_composition(
        m0[0], m0[1], m0[2], h, int(steps), inv1, inv3,
        np.ascontiguousarray(axes), np.ascontiguousarray(coeffs), int(sample_every),
    )


def one_step_map(params: RigidBodyParams, method: str = "lie_trotter") -> OneStepMap:
    """Wrap a composition method as a generic one-step map for the verification routines."""
    scheme = split_scheme(params)
    if method == "lie_trotter":
        apply = lambda x, h: lie_trotter_step(scheme, x, h)
    elif method == "lie_trotter_frozen":
        apply = lambda x, h: lie_trotter_rigid_step(params, x, h, frozen=True)
    elif method == "strang":
        apply = lambda x, h: strang_step(scheme, x, h)
    else:
        match = _YOSHIDA_RE.match(method)
        if not match:
            raise ValueError(f"unknown composition method {method!r}")
        order = int(match.group(1) or 4)
        apply = lambda x, h: yoshida_step(scheme, x, h, order=order)
    return OneStepMap(dimension=3, apply=apply)
