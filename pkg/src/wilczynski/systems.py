"""Matrix-valued invariants of systems of ODEs.

For a linear system ``y^(n+1) + P_n y^(n) + ... + P_0 y = 0`` in canonical
form (``P_n = 0`` and ``tr P_{n-1} = 0``) the invariants ``Theta_2 ..
Theta_{n+1}`` are given by a closed-form sum.  Second-order systems
``y'' = A y' + B y`` are handled directly through
``Phi = B - A'/2 + A^2/4`` and its traceless part; replacing ``A``, ``B`` by
the Jacobians of a nonlinear system and ``'`` by the total derivative gives
the nonlinear generalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .equations import OdeSystem2
from .errors import DimensionError, PreconditionError
from .expr import Expr, system_jet_name
from .linear import lf_coefficient
from .matrix import Matrix


@dataclass(frozen=True)
class MatrixInvariant:
    weight: int
    value: Matrix

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero


def _x_derivative(e: Expr) -> Expr:
    return e.diff("x")


@dataclass(frozen=True)
class LinearSystem:
    """``y^(n+1) + P_n y^(n) + ... + P_0 y = 0`` for ``y`` in ``R^m``."""

    P: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "P", tuple(self.P))
        if len(self.P) < 2:
            raise PreconditionError("a linear system needs order >= 2")
        m = self.P[0].rows
        for mat in self.P:
            if mat.shape != (m, m):
                raise DimensionError("coefficient matrices must all be m x m")

    @property
    def m(self) -> int:
        return self.P[0].rows

    @property
    def n(self) -> int:
        return len(self.P) - 1

    @property
    def order(self) -> int:
        return len(self.P)

    def is_canonical(self) -> bool:
        return self.P[self.n].is_zero and self.P[self.n - 1].trace().is_zero


def theta_k_systems(
    system: LinearSystem, derivative: Callable[[Expr], Expr] = _x_derivative
) -> dict[int, MatrixInvariant]:
    """``Theta_2 .. Theta_{n+1}`` of a system in canonical form."""
    if not system.is_canonical():
        raise PreconditionError("system is not in canonical form (need P_n = 0 and tr P_{n-1} = 0)")
    n = system.n
    jets: dict[tuple[int, int], Matrix] = {}

    def jet(i: int, j: int) -> Matrix:
        if (i, j) not in jets:
            jets[(i, j)] = system.P[i] if j == 0 else jet(i, j - 1).map(derivative)
        return jets[(i, j)]

    out = {}
    for k in range(2, n + 2):
        acc = Matrix.zeros(system.m)
        for j in range(1, k):
            acc = acc + jet(n - k + j, j - 1).scale(lf_coefficient(n, k, j))
        out[k] = MatrixInvariant(k, acc)
    return out


def _square(a: Matrix, b: Matrix) -> None:
    if not a.is_square or a.shape != b.shape:
        raise DimensionError("A and B must be square matrices of the same size")


def semi_canonicalize_2nd(
    A: Matrix, B: Matrix, derivative: Callable[[Expr], Expr] = _x_derivative
) -> Matrix:
    """``Phi = B - A'/2 + A^2/4`` for ``y'' = A y' + B y``.

    ``y = M z`` with ``M' = A M / 2`` turns the system into ``z'' = M^-1 Phi M z``.
    """
    _square(A, B)
    half = A.map(derivative).scale(Expr.const(1) / 2)
    return B - half + (A @ A).scale(Expr.const(1) / 4)


def traceless_part(m: Matrix) -> Matrix:
    size = m.rows
    return m - Matrix.identity(size).scale(m.trace() / size)


def theta2_linear(A: Matrix, B: Matrix, derivative: Callable[[Expr], Expr] = _x_derivative) -> MatrixInvariant:
    """Traceless part of ``Phi``; it vanishes iff the system is trivializable."""
    return MatrixInvariant(2, traceless_part(semi_canonicalize_2nd(A, B, derivative)))


def jacobians(system: OdeSystem2) -> tuple[Matrix, Matrix]:
    """``A = (df_i/dy_k')`` and ``B = (df_i/dy_k)``."""
    m = system.m
    A = Matrix([[f.diff(system_jet_name(k, 1)) for k in range(1, m + 1)] for f in system.rhs])
    B = Matrix([[f.diff(system_jet_name(k, 0)) for k in range(1, m + 1)] for f in system.rhs])
    return A, B


def theta2_nonlinear(system: OdeSystem2) -> MatrixInvariant:
    A, B = jacobians(system)
    return theta2_linear(A, B, system.total_derivative)


def linear_system_2nd(A: Sequence[Sequence], B: Sequence[Sequence]) -> OdeSystem2:
    """The system ``y'' = A(x) y' + B(x) y`` as an :class:`OdeSystem2`."""
    A, B = Matrix(A), Matrix(B)
    _square(A, B)
    m = A.rows
    rhs = []
    for i in range(m):
        acc = Expr.const(0)
        for k in range(m):
            acc = acc + A[i, k] * Expr.var(system_jet_name(k + 1, 1)) + B[i, k] * Expr.var(system_jet_name(k + 1, 0))
        rhs.append(acc)
    return OdeSystem2(tuple(rhs))
