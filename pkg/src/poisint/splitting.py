"""Composition one-step methods built from exactly integrable flows.

A split scheme is an ordered list of exact flows whose generators sum to
the full vector field.  Compositions of those flows give the first-order
sequential method, the palindromic second-order method, and the recursive
triple-jump ladder reaching any even order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

from .poisson import Array, as_state


@dataclass(frozen=True)
class ExactFlow:
    """Exact flow map (x, t) -> flow_t(x) of one summand; must accept negative t."""

    dimension: int
    advance: Callable[[Array, float], Array]


@dataclass(frozen=True)
class SplitScheme:
    """Ordered exact flows on one state space.

    ``order_target`` records the intended composition order (1 for the
    plain sequential method); the step functions below take the order
    explicitly and treat this field as metadata.
    """

    flows: tuple
    order_target: int = 1

    def __post_init__(self):
        flows = tuple(self.flows)
        if not flows:
            raise ValueError("a split scheme needs at least one flow")
        if len({flow.dimension for flow in flows}) != 1:
            raise ValueError("all flows in a scheme must share one dimension")
        object.__setattr__(self, "flows", flows)

    @property
    def dimension(self) -> int:
        return self.flows[0].dimension


def lie_trotter_step(scheme: SplitScheme, x, h: float) -> Array:
    """Apply every flow for time h, in list order."""
    x = as_state(x, scheme.dimension)
    for flow in scheme.flows:
        x = flow.advance(x, h)
    return x


def strang_step(scheme: SplitScheme, x, h: float) -> Array:
    """Palindromic composition: half steps up the list, a full step on the last flow, half steps back."""
    x = as_state(x, scheme.dimension)
    half = 0.5 * h
    for flow in scheme.flows[:-1]:
        x = flow.advance(x, half)
    x = scheme.flows[-1].advance(x, h)
    for flow in reversed(scheme.flows[:-1]):
        x = flow.advance(x, half)
    return x


@dataclass(frozen=True)
class CompositionCoefficients:
    """Triple-jump weights raising an order-2n method to order 2n+2; x0 + 2 x1 = 1."""

    n: int
    x0: float
    x1: float


def composition_coefficients(n: int) -> CompositionCoefficients:
    """Weights x0 = r/(r - 2), x1 = 1/(2 - r) with r = 2^(1/(2n+1))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    root = 2.0 ** (1.0 / (2 * n + 1))
    return CompositionCoefficients(n=n, x0=root / (root - 2.0), x1=1.0 / (2.0 - root))


def composition_step_count(n: int) -> int:
    """Step count 1 + 3^(n-1) of the order-2n composition."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 + 3 ** (n - 1)


def strang_application_count(n: int) -> int:
    """Number of second-order building blocks, 3^(n-1), used per order-2n step."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 3 ** (n - 1)


def yoshida_step(scheme: SplitScheme, x, h: float, order: int = 4) -> Array:
    """Recursive triple-jump composition of even order >= 4.

    Order 2n+2 applies the order-2n method with substep sizes x1 h, x0 h,
    x1 h; the x0 substep runs backwards in time, so the flows must accept
    negative arguments.
    """
    if order < 4 or order % 2:
        raise ValueError("composition order must be an even integer >= 4")
    if order > 8:
        warnings.warn(
            f"order-{order} composition applies the second-order block "
            f"{strang_application_count(order // 2)} times per step",
            stacklevel=2,
        )
    x = as_state(x, scheme.dimension)
    return _compose(scheme, x, h, order)


def _compose(scheme, x, h, order):
    if order == 2:
        return strang_step(scheme, x, h)
    coeff = composition_coefficients((order - 2) // 2)
    for weight in (coeff.x1, coeff.x0, coeff.x1):
        x = _compose(scheme, x, weight * h, order - 2)
    return x
