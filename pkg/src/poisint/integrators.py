"""One-step maps for autonomous systems x' = f(x).

Covers the explicit Euler update, two implicit Euler-type variants, the
implicit midpoint (one-stage Gauss-Legendre) rule, general Runge-Kutta
steps driven by a Butcher tableau, the planar Ruth map, and the algebraic
symplecticity test on tableau coefficients.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .poisson import Array, as_state


@dataclass(frozen=True)
class VectorField:
    """Right-hand side of an autonomous first-order system."""

    dimension: int
    eval: Callable[[Array], Array]

    def __call__(self, x) -> Array:
        return np.asarray(self.eval(x), dtype=float)


@dataclass(frozen=True)
class ImplicitSolverConfig:
    """Iteration controls for implicit one-step relations.

    ``tolerance`` bounds the max-norm change between successive fixed-point
    iterates (for ``newton_fd`` it bounds the max-norm residual of the
    defining relation instead).
    """

    tolerance: float = 1e-12
    max_iterations: int = 100
    strategy: str = "fixed_point"

    def __post_init__(self):
        if not 0.0 < self.tolerance < 1.0:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        if self.strategy not in ("fixed_point", "newton_fd"):
            raise ValueError(f"unknown solver strategy {self.strategy!r}")


class ConvergenceError(RuntimeError):
    """Implicit solve missed its tolerance; carries the final residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


def _fixed_point(step_map, y0, cfg: ImplicitSolverConfig):
    y = np.asarray(y0, dtype=float)
    delta = np.inf
    for _ in range(cfg.max_iterations):
        y_next = np.asarray(step_map(y), dtype=float)
        delta = float(np.max(np.abs(y_next - y)))
        y = y_next
        if delta <= cfg.tolerance:
            return y
    raise ConvergenceError("fixed-point iteration did not converge", delta)


def _fd_jac(func, y, eps_scale=1e-7):
    n = y.size
    jac = np.empty((n, n))
    for j in range(n):
        eps = eps_scale * max(1.0, abs(y[j]))
        yp = y.copy()
        ym = y.copy()
        yp[j] += eps
        ym[j] -= eps
        jac[:, j] = (np.asarray(func(yp), dtype=float) - np.asarray(func(ym), dtype=float)) / (2.0 * eps)
    return jac


def _newton_fd(step_map, y0, cfg: ImplicitSolverConfig):
    """Newton iteration on F(y) = y - step_map(y) with a finite-difference Jacobian."""
    y = np.asarray(y0, dtype=float).copy()
    residual = np.inf
    for _ in range(cfg.max_iterations):
        fy = y - np.asarray(step_map(y), dtype=float)
        residual = float(np.max(np.abs(fy)))
        if residual <= cfg.tolerance:
            return y
        jac = np.eye(y.size) - _fd_jac(step_map, y)
        try:
            delta = np.linalg.solve(jac, fy)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Newton system: {exc}", residual) from exc
        y = y - delta
    raise ConvergenceError("Newton iteration did not converge", residual)


def _solve_implicit(step_map, y0, cfg: ImplicitSolverConfig):
    if cfg.strategy == "newton_fd":
        return _newton_fd(step_map, y0, cfg)
    return _fixed_point(step_map, y0, cfg)


@dataclass(frozen=True)
class ButcherTableau:
    """Runge-Kutta coefficients: stage matrix ``a`` (s x s) and weights ``b`` (length s).

    Weights that do not sum to 1 make the method inconsistent; construction
    warns but does not refuse.
    """

    a: Array
    b: Array

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"stage matrix must be square, got shape {a.shape}")
        if b.shape != (a.shape[0],):
            raise ValueError(f"weights have length {b.size}, expected {a.shape[0]}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if abs(float(np.sum(b)) - 1.0) > 1e-14:
            warnings.warn("tableau weights do not sum to 1; the method is inconsistent", stacklevel=2)

    @property
    def stages(self) -> int:
        return self.b.size

    @property
    def is_explicit(self) -> bool:
        """True when the stage matrix is strictly lower triangular."""
        return bool(np.all(np.triu(self.a) == 0.0))


TABLEAUX = {
    "euler": ButcherTableau(a=[[0.0]], b=[1.0]),
    "midpoint": ButcherTableau(a=[[0.5]], b=[1.0]),
    "rk4": ButcherTableau(
        a=[
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ],
        b=[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
    ),
    "trapezoid": ButcherTableau(a=[[0.0, 0.0], [0.5, 0.5]], b=[0.5, 0.5]),
}


def explicit_euler_step(f: VectorField, x, h: float) -> Array:
    """x + h f(x)."""
    x = as_state(x, f.dimension)
    return x + h * f(x)


def modified_euler_step(f: VectorField, x, h: float, cfg: ImplicitSolverConfig = ImplicitSolverConfig()) -> Array:
    """Solve y = x + h (f(x) + f(y)).

    The update applies the full sum of both evaluations, twice the
    trapezoidal average; see ``trapezoid_step`` for the averaged variant.
    """
    x = as_state(x, f.dimension)
    fx = f(x)
    return _solve_implicit(lambda y: x + h * (fx + f(y)), x, cfg)


def trapezoid_step(f: VectorField, x, h: float, cfg: ImplicitSolverConfig = ImplicitSolverConfig()) -> Array:
    """Solve y = x + (h/2) (f(x) + f(y)), the trapezoidal rule."""
    x = as_state(x, f.dimension)
    fx = f(x)
    return _solve_implicit(lambda y: x + 0.5 * h * (fx + f(y)), x, cfg)


def gauss_legendre_step(f: VectorField, x, h: float, cfg: ImplicitSolverConfig = ImplicitSolverConfig()) -> Array:
    """Solve y = x + h f((x + y)/2), the implicit midpoint rule."""
    x = as_state(x, f.dimension)
    return _solve_implicit(lambda y: x + h * f(0.5 * (x + y)), x, cfg)


def rk_step(
    f: VectorField,
    tab: ButcherTableau,
    x,
    h: float,
    cfg: ImplicitSolverConfig = ImplicitSolverConfig(),
) -> Array:
    """One Runge-Kutta step: stages X_i = x + h sum_j a_ij f(X_j), update x + h sum_i b_i f(X_i).

    Strictly lower-triangular tableaux are solved by forward substitution;
    anything else goes through the configured implicit solver acting on the
    stacked stage vector.
    """
    x = as_state(x, f.dimension)
    s = tab.stages
    if tab.is_explicit:
        k = np.empty((s, x.size))
        for i in range(s):
            xi = x + h * (tab.a[i, :i] @ k[:i])
            k[i] = f(xi)
        return x + h * (tab.b @ k)

    def stage_map(stages):
        fs = np.array([f(stages[j]) for j in range(s)])
        return x[None, :] + h * (tab.a @ fs)

    stages0 = np.tile(x, (s, 1))
    if cfg.strategy == "newton_fd":
        flat = _newton_fd(lambda z: stage_map(z.reshape(s, x.size)).ravel(), stages0.ravel(), cfg)
        stages = flat.reshape(s, x.size)
    else:
        stages = _fixed_point(stage_map, stages0, cfg)
    fs = np.array([f(stages[j]) for j in range(s)])
    return x + h * (tab.b @ fs)


def symplectic_condition_residual(tab: ButcherTableau) -> Array:
    """Matrix with entries b_i a_ij + b_j a_ji - b_i b_j.

    All entries vanish exactly when the tableau generates a symplectic
    method; the output is symmetric by construction.
    """
    ba = tab.b[:, None] * tab.a
    return ba + ba.T - np.outer(tab.b, tab.b)


def ruth_step(x, h: float) -> Array:
    """Planar map (x1, x2) -> (x1 + h x2, -h x1 + (1 - h^2) x2).

    Its Jacobian [[1, h], [-h, 1 - h^2]] has unit determinant for every h,
    so the map preserves the area form exactly while not conserving the
    oscillator energy.
    """
    x = as_state(x, 2)
    return np.array([x[0] + h * x[1], -h * x[0] + (1.0 - h * h) * x[1]])
