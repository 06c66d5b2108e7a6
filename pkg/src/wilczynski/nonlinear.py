"""Generalized Wilczynski invariants of nonlinear equations ``y^(n+1) = f``.

The linearization of ``f`` along a solution is the linear equation with
coefficients ``p_i = -df/dy_i``; substituting ``p_i^(j) -> D^j(-df/dy_i)``
into the universal invariants gives functions ``W_k`` on the equation
manifold which are contact invariant up to a weight-``k`` factor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .deadline import Deadline, check
from .diffring import specialize
from .equations import OdeSingle
from .errors import PreconditionError
from .expr import ZERO, Expr, jet_name, parse_jet_name
from .linear import seashi_reduce


def linearization_coeffs(eq: OdeSingle) -> list[Expr]:
    """``a_i = df/dy_i`` for ``i = 0 .. n``."""
    return [eq.partial(i) for i in range(eq.order)]


@dataclass(frozen=True)
class Invariant:
    k: int
    value: Expr

    @property
    def weight(self) -> int:
        return self.k

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero


@dataclass(frozen=True)
class InvariantSet:
    order: int
    entries: dict[int, Invariant]

    @property
    def all_zero(self) -> bool:
        return all(e.is_zero for e in self.entries.values())

    def __getitem__(self, k: int) -> Invariant:
        return self.entries[k]

    def values(self) -> dict[int, Expr]:
        return {k: e.value for k, e in self.entries.items()}


def generalized_invariants(
    eq: OdeSingle, *, deadline: Deadline | None = None, weights: list[int] | None = None
) -> InvariantSet:
    """``W_3 .. W_{n+1}`` of an equation of order ``n + 1 >= 3``.

    ``weights`` restricts the computation to a subset of ``3 .. n+1``.
    """
    if eq.order < 3:
        raise PreconditionError("equations of order below 3 have no Wilczynski invariants")
    red = seashi_reduce(eq.n, deadline=deadline)
    wanted = sorted(red.thetabar) if weights is None else sorted(weights)
    entries = {}
    for k in wanted:
        if k not in red.thetabar:
            raise PreconditionError(f"no invariant of weight {k} for order {eq.order}")
        check(deadline, f"specializing W_{k}")
        entries[k] = Invariant(k, specialize(red.thetabar[k], eq))
    return InvariantSet(eq.order, entries)


# ---------------------------------------------------------------------------
# trivializability


@dataclass(frozen=True)
class Condition:
    name: str
    value: Expr

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero


@dataclass(frozen=True)
class TrivialityReport:
    invariants: InvariantSet
    extra_conditions: tuple[Condition, ...]

    @property
    def wilczynski_vanish(self) -> bool:
        return self.invariants.all_zero

    @property
    def trivializable(self) -> bool:
        return self.wilczynski_vanish and all(c.is_zero for c in self.extra_conditions)


def _partial(eq: OdeSingle, *indices: int) -> Expr:
    e = eq.rhs
    for i in indices:
        e = e.diff(jet_name(i))
    return e


def _label(*indices: int) -> str:
    sep = "," if any(i >= 10 for i in indices) else ""
    return "f_" + sep.join(str(i) for i in indices)


def extra_conditions(eq: OdeSingle) -> tuple[Condition, ...]:
    """Conditions besides ``W_k = 0`` for contact equivalence to ``y^(n+1) = 0``.

    Subscripts are jet indices: ``f_233`` is ``d^3 f / dy_2 dy_3^2``.
    """
    n = eq.n
    f = lambda *ix: _partial(eq, *ix)  # noqa: E731
    if n < 2:
        raise PreconditionError("trivializability is only tabulated for order >= 3")
    if n == 2:
        return (Condition(_label(2, 2, 2, 2), f(2, 2, 2, 2)),)
    if n == 3:
        return (
            Condition(_label(3, 3, 3), f(3, 3, 3)),
            Condition(f"6*{_label(2, 3, 3)} + {_label(3, 3)}^2", f(2, 3, 3) * 6 + f(3, 3) ** 2),
        )
    if n == 4:
        return (
            Condition(_label(4, 4), f(4, 4)),
            Condition(
                f"6*{_label(2, 3, 4)} - 4*{_label(3, 3, 3)} - 3*{_label(3, 4)}^2",
                f(2, 3, 4) * 6 - f(3, 3, 3) * 4 - f(3, 4) ** 2 * 3,
            ),
        )
    if n == 5:
        return (Condition(_label(5, 5), f(5, 5)), Condition(_label(4, 5), f(4, 5)))
    return (
        Condition(_label(n, n), f(n, n)),
        Condition(_label(n, n - 1), f(n, n - 1)),
        Condition(_label(n - 1, n - 1), f(n - 1, n - 1)),
    )


def trivializability_check(eq: OdeSingle, *, deadline: Deadline | None = None) -> TrivialityReport:
    extra = extra_conditions(eq)
    return TrivialityReport(generalized_invariants(eq, deadline=deadline), extra)


# ---------------------------------------------------------------------------
# point transformations


def _free_total_derivative(e: Expr, top: int) -> Expr:
    def rule(name):
        if name == "x":
            return Expr.const(1)
        k = parse_jet_name(name)
        if k is None:
            return None
        if k >= top:
            raise PreconditionError("prolongation needs jets beyond the requested order")
        return Expr.var(jet_name(k + 1))

    return e.derive(rule)


def point_transform(eq: OdeSingle, x_old: Expr, y_old: Expr) -> OdeSingle:
    """Rewrite ``eq`` in new coordinates given the old ones as functions of them.

    ``x_old`` and ``y_old`` are expressions in the new ``x`` and ``y`` (``y0``).
    The old jets are obtained by prolongation, ``y_{k+1} = D y_k / D x``, and
    the resulting relation is solved for the new top derivative, in which it
    is linear.
    """
    for e in (x_old, y_old):
        extra = {v for v in e.variables if v not in ("x", jet_name(0)) and parse_jet_name(v) is not None}
        if extra:
            raise PreconditionError("point transformations depend on x and y only")
    order = eq.order
    dx = _free_total_derivative(x_old, order + 1)
    if dx.is_zero:
        raise PreconditionError("degenerate transformation: x does not vary along curves")
    old = [y_old]
    for _ in range(order):
        old.append(_free_total_derivative(old[-1], order + 1) / dx)
    mapping = {"x": x_old, jet_name(0): y_old}
    mapping.update({jet_name(i): old[i] for i in range(1, order)})
    relation = old[order] - eq.rhs.subs(mapping)
    top = jet_name(order)
    coef = relation.diff(top)
    if coef.is_zero or not coef.diff(top).is_zero:
        raise PreconditionError("transformed equation is not solvable for the top derivative")
    rest = relation.subs({top: ZERO})
    return OdeSingle(order, -rest / coef)
