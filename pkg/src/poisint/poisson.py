"""Finite-dimensional Poisson systems: structure matrices, brackets, Hamiltonian fields.

States are plain 1-D float arrays.  A system bundles a state-dependent
antisymmetric structure matrix with a Hamiltonian (and optionally its
gradient and a list of Casimir functions); everything else in the package
acts on these objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Array = np.ndarray

#: Relative scale of the central-difference gradient fallback.
DEFAULT_FD_SCALE = 1e-6

_ANTISYMMETRY_TOL = 1e-12


def as_state(x, dimension: Optional[int] = None) -> Array:
    """Validate a state vector and return it as a 1-D float array."""
    out = np.asarray(x, dtype=float)
    if out.ndim != 1 or out.size < 1:
        raise ValueError(f"state must be a non-empty 1-D sequence, got shape {out.shape}")
    if dimension is not None and out.size != dimension:
        raise ValueError(f"state has length {out.size}, expected {dimension}")
    if not np.all(np.isfinite(out)):
        raise ValueError("state contains non-finite entries")
    return out


def fd_gradient(func: Callable[[Array], float], x, scale: float = DEFAULT_FD_SCALE) -> Array:
    """Central-difference gradient with per-coordinate step scale * max(1, |x_i|)."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        eps = scale * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += eps
        xm[i] -= eps
        grad[i] = (func(xp) - func(xm)) / (2.0 * eps)
    return grad


@dataclass(frozen=True)
class ScalarField:
    """Real-valued observable with an optional analytic gradient."""

    eval: Callable[[Array], float]
    gradient: Optional[Callable[[Array], Array]] = None

    def grad(self, x, scale: float = DEFAULT_FD_SCALE) -> Array:
        if self.gradient is not None:
            return np.asarray(self.gradient(x), dtype=float)
        return fd_gradient(self.eval, x, scale)


def as_scalar_field(obj) -> ScalarField:
    """Accept a ScalarField or any callable observable."""
    if isinstance(obj, ScalarField):
        return obj
    if callable(obj):
        return ScalarField(eval=obj)
    raise TypeError(f"expected a ScalarField or a callable, got {type(obj).__name__}")


@dataclass(frozen=True)
class PoissonSystem:
    """State space carrying an antisymmetric structure matrix and a Hamiltonian.

    ``structure`` maps a state to the n x n structure matrix.  When
    ``hamiltonian_gradient`` is absent, gradients fall back to central
    differences controlled by ``fd_scale``; set ``fd_scale=None`` to
    require analytic gradients.  Instances are immutable and safe to share
    across threads.
    """

    dimension: int
    structure: Callable[[Array], Array]
    hamiltonian: Callable[[Array], float]
    hamiltonian_gradient: Optional[Callable[[Array], Array]] = None
    casimirs: tuple = ()
    fd_scale: Optional[float] = DEFAULT_FD_SCALE

    def __post_init__(self):
        if int(self.dimension) < 1:
            raise ValueError("dimension must be a positive integer")
        object.__setattr__(self, "casimirs", tuple(as_scalar_field(c) for c in self.casimirs))

    def grad_hamiltonian(self, x) -> Array:
        if self.hamiltonian_gradient is not None:
            return np.asarray(self.hamiltonian_gradient(x), dtype=float)
        if self.fd_scale is None:
            raise RuntimeError(
                "no analytic Hamiltonian gradient is set and finite differences are disabled"
            )
        return fd_gradient(self.hamiltonian, x, self.fd_scale)


def structure_matrix(system: PoissonSystem, x) -> Array:
    """Evaluate the structure matrix at x, checking shape and antisymmetry."""
    x = as_state(x, system.dimension)
    pi = np.asarray(system.structure(x), dtype=float)
    n = system.dimension
    if pi.shape != (n, n):
        raise ValueError(f"structure matrix has shape {pi.shape}, expected {(n, n)}")
    if not np.isfinite(pi).all():
        raise ValueError("structure matrix has non-finite entries")
    defect = float(np.max(np.abs(pi + pi.T)))
    if defect > _ANTISYMMETRY_TOL:
        raise ValueError(f"structure matrix is not antisymmetric (defect {defect:.3e})")
    return pi


def poisson_bracket(system: PoissonSystem, f, g, x) -> float:
    """Evaluate {f, g}(x) = grad f(x) . Pi(x) . grad g(x)."""
    x = as_state(x, system.dimension)
    f = as_scalar_field(f)
    g = as_scalar_field(g)
    scale = system.fd_scale if system.fd_scale is not None else DEFAULT_FD_SCALE
    pi = structure_matrix(system, x)
    return float(f.grad(x, scale) @ pi @ g.grad(x, scale))


def hamiltonian_vector_field(system: PoissonSystem, x) -> Array:
    """Evaluate Pi(x) . grad H(x)."""
    x = as_state(x, system.dimension)
    return structure_matrix(system, x) @ system.grad_hamiltonian(x)


def canonical_structure(dof: int) -> Array:
    """Constant canonical structure matrix [[0, I], [-I, 0]] on R^(2*dof)."""
    if dof < 1:
        raise ValueError("dof must be a positive integer")
    n = 2 * dof
    pi = np.zeros((n, n))
    pi[:dof, dof:] = np.eye(dof)
    pi[dof:, :dof] = -np.eye(dof)
    return pi
