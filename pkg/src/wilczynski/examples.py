"""Equations whose generalized invariants vanish identically.

Each is the equation of a family of curves carrying a natural twistor-type
geometry: rational normal curves (the trivial equation), plane conics, graphs
of rational functions of bounded degree type, and a family of Legendrian
curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .equations import OdeSingle
from .errors import PreconditionError
from .expr import ONE, ZERO, Expr, jet_name
from .matrix import Matrix


def _y(k: int) -> Expr:
    return Expr.var(jet_name(k))


def gen_trivial(order: int) -> OdeSingle:
    if order < 3:
        raise PreconditionError("the trivial example needs order >= 3")
    return OdeSingle(order, ZERO)


def quadric_polynomial() -> Expr:
    """``9 y''^2 y^(5) - 45 y'' y''' y^(4) + 40 y'''^3``."""
    y2, y3, y4, y5 = (_y(k) for k in (2, 3, 4, 5))
    return 9 * y2**2 * y5 - 45 * y2 * y3 * y4 + 40 * y3**3


def gen_quadric() -> OdeSingle:
    """Fifth-order equation of all plane conics."""
    return OdeSingle(5, solve_for_top(quadric_polynomial(), 5))


def legendrian7_polynomial() -> Expr:
    y3, y4, y5, y6, y7 = (_y(k) for k in (3, 4, 5, 6, 7))
    return (
        10 * y3**3 * y7
        - 70 * y3**2 * y4 * y6
        - 49 * y3**2 * y5**2
        + 280 * y3 * y4**2 * y5
        - 175 * y4**4
    )


def gen_legendrian7() -> OdeSingle:
    return OdeSingle(7, solve_for_top(legendrian7_polynomial(), 7))


def solve_for_top(relation: Expr, order: int) -> Expr:
    """Solve ``relation = 0`` for ``y^(order)``, in which it must be linear."""
    top = jet_name(order)
    coef = relation.diff(top)
    if coef.is_zero:
        raise PreconditionError(f"relation does not involve y^({order})")
    if not coef.diff(top).is_zero:
        raise PreconditionError(f"relation is not linear in y^({order})")
    return -relation.subs({top: ZERO}) / coef


def bareiss_determinant(m: Matrix) -> Expr:
    """Fraction-free elimination; every division is exact for polynomial entries."""
    if not m.is_square:
        raise PreconditionError("determinant of a non-square matrix")
    a = m.tolist()
    size = len(a)
    sign = 1
    prev = ONE
    for k in range(size - 1):
        if a[k][k].is_zero:
            swap = next((r for r in range(k + 1, size) if not a[r][k].is_zero), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    det = a[-1][-1]
    return det if sign > 0 else -det


def hankel_matrix(k: int, l: int) -> Matrix:
    """``[z_{k-l+1+a+b}]`` with ``z_i = (-1)^i y^(i) / i!``."""

    def z(i: int) -> Expr:
        return _y(i) * Fraction((-1) ** i, math.factorial(i))

    return Matrix([[z(k - l + 1 + a + b) for b in range(l + 1)] for a in range(l + 1)])


def hankel_polynomial(k: int, l: int) -> Expr:
    return bareiss_determinant(hankel_matrix(k, l))


def gen_hankel(k: int, l: int) -> OdeSingle:
    """Equation satisfied by every rational function ``P_k / Q_l``; order ``k + l + 1``."""
    if l < 0 or k < l:
        raise PreconditionError("need k >= l >= 0")
    if l == 0:
        return gen_trivial(k + 1)
    order = k + l + 1
    return OdeSingle(order, solve_for_top(hankel_polynomial(k, l), order))


@dataclass(frozen=True)
class ExampleSpec:
    name: str
    equation: OdeSingle
    params: dict = field(default_factory=dict)
    note: str = ""


def example(name: str, *, k: int | None = None, l: int | None = None, order: int | None = None) -> ExampleSpec:
    """Look up an example by name: ``trivial``, ``quadric``, ``hankel`` or ``legendrian7``."""
    if name == "trivial":
        if order is None:
            raise PreconditionError("the trivial example needs an order")
        return ExampleSpec(name, gen_trivial(order), {"order": order}, "rational normal curves")
    if name == "quadric":
        return ExampleSpec(name, gen_quadric(), {}, "plane conics")
    if name == "hankel":
        if k is None or l is None:
            raise PreconditionError("the hankel example needs k and l")
        return ExampleSpec(name, gen_hankel(k, l), {"k": k, "l": l}, f"rational functions of type ({k}, {l})")
    if name == "legendrian7":
        return ExampleSpec(name, gen_legendrian7(), {}, "Legendrian curves, order 7")
    raise PreconditionError(f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}")


EXAMPLE_NAMES = ("trivial", "quadric", "hankel", "legendrian7")
