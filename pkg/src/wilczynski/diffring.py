"""The differential polynomial ring Q{p_0, ..., p_n}.

Elements are polynomials in formal indeterminates ``p_i^(j)`` (stored as the
variables ``p<i>_<j>`` of an :class:`~wilczynski.expr.Expr`, so the ring
shares the expression kernel's normal form) together with the formal
derivation ``delta(p_i^(j)) = p_i^(j+1)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .equations import OdeSingle
from .errors import PreconditionError
from .expr import Expr, indeterminate_name, parse_indeterminate_name
from .matrix import Matrix


def _delta_rule(name: str):
    ij = parse_indeterminate_name(name)
    if ij is None:
        return None
    return Expr.var(indeterminate_name(ij[0], ij[1] + 1))


def delta_expr(e: Expr) -> Expr:
    """Formal derivation on any expression whose only varying symbols are ``p_i^(j)``."""
    return e.derive(_delta_rule)


class DiffPoly:
    """Element of Q{p_0..p_n}; ``order`` is ``n``."""

    __slots__ = ("expr", "order")

    def __init__(self, expr: Expr | int | Fraction, order: int):
        expr = expr if isinstance(expr, Expr) else Expr.const(expr)
        if not expr.is_polynomial:
            raise PreconditionError("differential polynomials have no denominators")
        for name in expr.variables:
            ij = parse_indeterminate_name(name)
            if ij is None or ij[0] > order:
                raise PreconditionError(f"{name} is not an indeterminate of Q{{p_0..p_{order}}}")
        self.expr = expr
        self.order = order

    @classmethod
    def indeterminate(cls, i: int, j: int, order: int) -> "DiffPoly":
        if not 0 <= i <= order or j < 0:
            raise PreconditionError(f"p_{i}^({j}) is not an indeterminate of order {order}")
        return cls(Expr.var(indeterminate_name(i, j)), order)

    def _lift(self, other) -> Expr | None:
        if isinstance(other, DiffPoly):
            if other.order != self.order:
                raise PreconditionError("mixing differential polynomials of different orders")
            return other.expr
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Expr.const(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else DiffPoly(self.expr + o, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else DiffPoly(self.expr - o, self.order)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else DiffPoly(o - self.expr, self.order)

    def __neg__(self):
        return DiffPoly(-self.expr, self.order)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else DiffPoly(self.expr * o, self.order)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return DiffPoly(self.expr**e, self.order)

    def __eq__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else self.expr == o

    def __hash__(self):
        return hash((self.expr, self.order))

    @property
    def is_zero(self) -> bool:
        return self.expr.is_zero

    def delta(self) -> "DiffPoly":
        return DiffPoly(delta_expr(self.expr), self.order)

    def monomials(self) -> list[tuple[dict[tuple[int, int], int], Fraction]]:
        out = []
        for exps, coeff in self.expr.terms():
            out.append(({parse_indeterminate_name(k): e for k, e in exps.items()}, coeff))
        return out

    def weight_of(self, monomial: dict[tuple[int, int], int]) -> int:
        """Isobaric weight, with ``p_i^(j)`` counting ``n + 1 - i + j``."""
        n = self.order
        return sum(e * (n + 1 - i + j) for (i, j), e in monomial.items())

    def weights(self) -> set[int]:
        return {self.weight_of(m) for m, _ in self.monomials()}

    def is_isobaric(self, weight: int) -> bool:
        return self.weights() <= {weight}

    def to_text(self) -> str:
        return self.expr.to_text()

    def to_latex(self) -> str:
        return self.expr.to_latex()

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"DiffPoly({self.to_text()!r}, order={self.order})"


def delta(p: DiffPoly) -> DiffPoly:
    return p.delta()


class DiffMatrix(Matrix):
    """Square or rectangular matrix over the differential polynomial ring."""

    __slots__ = ()

    def delta(self) -> "DiffMatrix":
        return self.map(delta_expr)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a.commutator(b)


@lru_cache(maxsize=4096)
def _coefficient_jet(eq: OdeSingle, i: int, j: int) -> Expr:
    """``D^j(-df/dy_i)`` on the equation manifold."""
    if j == 0:
        return -eq.partial(i)
    return eq.total_derivative(_coefficient_jet(eq, i, j - 1))


def specialize(p: DiffPoly | Expr, eq: OdeSingle) -> Expr:
    """Replace every ``p_i^(j)`` by ``D^j(-df/dy_i)``; a linear equation is its own linearization."""
    expr = p.expr if isinstance(p, DiffPoly) else p
    order = p.order if isinstance(p, DiffPoly) else None
    if order is not None and order != eq.n:
        raise PreconditionError(f"differential polynomial of order {order} specialized on an equation with n = {eq.n}")
    mapping = {}
    for name in expr.variables:
        ij = parse_indeterminate_name(name)
        if ij is None:
            continue
        if ij[0] > eq.n:
            raise PreconditionError(f"{name} has no counterpart for an equation of order {eq.order}")
        mapping[name] = _coefficient_jet(eq, *ij)
    return expr.subs(mapping)
