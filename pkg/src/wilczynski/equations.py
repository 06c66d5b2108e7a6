"""Equations solved for the highest derivative, and their total derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import ParseError, PreconditionError
from .expr import (
    Expr,
    display_name,
    jet_name,
    parse_jet_name,
    parse_system_jet_name,
    system_jet_name,
)
from .parser import ParseContext, parse_relation

ONE = Expr.const(1)


@dataclass(frozen=True)
class OdeSingle:
    """The equation ``y^(order) = rhs(x, y, y', ..., y^(order-1))``.

    The equation manifold has coordinates ``x, y0, ..., yn`` with
    ``n = order - 1``; every other variable in ``rhs`` is a constant
    parameter.
    """

    order: int
    rhs: Expr

    def __post_init__(self):
        if self.order < 1:
            raise PreconditionError("order must be positive")
        for name in self.rhs.variables:
            k = parse_jet_name(name)
            if k is not None and k >= self.order:
                raise PreconditionError(
                    f"right-hand side depends on {display_name(name)}, which is not below the order {self.order}"
                )
            if parse_system_jet_name(name) is not None:
                raise PreconditionError(f"system variable {display_name(name)} in a single equation")

    @property
    def n(self) -> int:
        return self.order - 1

    @property
    def jet_names(self) -> list[str]:
        return [jet_name(i) for i in range(self.order)]

    @property
    def parameters(self) -> frozenset[str]:
        return frozenset(v for v in self.rhs.variables if v != "x" and parse_jet_name(v) is None)

    def _rule(self, name: str):
        if name == "x":
            return ONE
        k = parse_jet_name(name)
        if k is None:
            return None
        if k < self.n:
            return Expr.var(jet_name(k + 1))
        if k == self.n:
            return self.rhs
        raise PreconditionError(f"{display_name(name)} is not a coordinate of the equation manifold")

    def total_derivative(self, e: Expr) -> Expr:
        """``D e = e_x + sum_{i<n} y_{i+1} e_{y_i} + f e_{y_n}``."""
        return e.derive(self._rule)

    @cached_property
    def _partials(self) -> dict[int, Expr]:
        return {i: self.rhs.diff(jet_name(i)) for i in range(self.order)}

    def partial(self, i: int) -> Expr:
        """``df/dy_i``."""
        return self._partials[i]

    def to_text(self) -> str:
        return f"{display_name(jet_name(self.order))} = {self.rhs.to_text()}"

    def to_latex(self) -> str:
        from .expr import latex_name

        return f"{latex_name(jet_name(self.order))} = {self.rhs.to_latex()}"

    def __str__(self):
        return self.to_text()


def total_derivative(e: Expr, eq: OdeSingle) -> Expr:
    return eq.total_derivative(e)


def parse_equation(text: str, params=None) -> OdeSingle:
    """Parse ``y^(m) = rhs`` into an :class:`OdeSingle` of order ``m``."""
    ctx = ParseContext(params=frozenset(params) if params is not None else None)
    lhs, rhs, (line, col) = parse_relation(text, ctx)
    names = lhs.variables
    if len(names) != 1 or lhs != Expr.var(next(iter(names))) or parse_jet_name(next(iter(names))) is None:
        raise ParseError("left-hand side must be the highest derivative, e.g. y''' or y^(5)", line, col)
    order = parse_jet_name(next(iter(names)))
    if order < 1:
        raise ParseError("left-hand side must be a derivative of y", line, col)
    for name in rhs.variables:
        k = parse_jet_name(name)
        if k is not None and k >= order:
            raise ParseError(f"right-hand side contains {display_name(name)}, not below the order {order}", line, col)
    return OdeSingle(order, rhs)


@dataclass(frozen=True)
class OdeSystem2:
    """Second-order system ``y_i'' = f_i(x, y_1..y_m, y_1'..y_m')``."""

    rhs: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))
        m = len(self.rhs)
        if m < 1:
            raise PreconditionError("a system needs at least one equation")
        for f in self.rhs:
            for name in f.variables:
                if parse_jet_name(name) is not None:
                    raise PreconditionError(f"single-equation variable {display_name(name)} in a system")
                ij = parse_system_jet_name(name)
                if ij is None:
                    continue
                i, j = ij
                if not 1 <= i <= m:
                    raise PreconditionError(f"unknown y{i} in a system of size {m}")
                if j >= 2:
                    raise PreconditionError(f"{display_name(name)} appears on a right-hand side")

    @property
    def m(self) -> int:
        return len(self.rhs)

    def _rule(self, name: str):
        if name == "x":
            return ONE
        ij = parse_system_jet_name(name)
        if ij is None:
            return None
        i, j = ij
        if j == 0:
            return Expr.var(system_jet_name(i, 1))
        if j == 1:
            return self.rhs[i - 1]
        raise PreconditionError(f"{display_name(name)} is not a coordinate of the equation manifold")

    def total_derivative(self, e: Expr) -> Expr:
        """``D = d/dx + sum y_i' d/dy_i + sum f_j d/dy_j'``."""
        return e.derive(self._rule)

    def to_text(self) -> str:
        return "\n".join(
            f"{display_name(system_jet_name(i + 1, 2))} = {f.to_text()}" for i, f in enumerate(self.rhs)
        )


def parse_system(text: str, params=None) -> OdeSystem2:
    """Parse one ``yi'' = ...`` line per unknown (blank lines and ``;`` separators allowed)."""
    ctx = ParseContext(params=frozenset(params) if params is not None else None, system=True)
    lines = [ln for chunk in text.splitlines() for ln in chunk.split(";")]
    found: dict[int, Expr] = {}
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            lhs, rhs, (line, col) = parse_relation(raw, ctx)
        except ParseError as exc:
            raise ParseError(exc.message, lineno, exc.column) from None
        names = lhs.variables
        ij = parse_system_jet_name(next(iter(names))) if len(names) == 1 else None
        if ij is None or ij[1] != 2 or lhs != Expr.var(next(iter(names))):
            raise ParseError("left-hand side must be y<i>''", lineno, col)
        if ij[0] in found:
            raise ParseError(f"duplicate equation for y{ij[0]}", lineno, col)
        found[ij[0]] = rhs
    if not found:
        raise ParseError("no equations found", 1, 1)
    m = max(found)
    missing = [i for i in range(1, m + 1) if i not in found]
    if missing:
        raise ParseError(f"missing equation for y{missing[0]}", len(lines), 1)
    return OdeSystem2(tuple(found[i] for i in range(1, m + 1)))
