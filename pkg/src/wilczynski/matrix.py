"""Small dense matrices with exact :class:`Expr` entries."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DimensionError, PoleError
from .expr import ONE, ZERO, Expr


def _as_expr(v) -> Expr:
    return v if isinstance(v, Expr) else Expr.const(v)


class Matrix:
    """Immutable rows x cols matrix of exact expressions."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Sequence[Sequence]):
        rows = [tuple(_as_expr(v) for v in row) for row in entries]
        if not rows or not rows[0]:
            raise DimensionError("matrices must be non-empty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged rows")
        self.rows = len(rows)
        self.cols = width
        self._e = tuple(rows)

    @classmethod
    def _raw(cls, rows):
        obj = cls.__new__(cls)
        obj.rows = len(rows)
        obj.cols = len(rows[0])
        obj._e = tuple(tuple(r) for r in rows)
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None):
        cols = rows if cols is None else cols
        return cls._raw([[ZERO] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, size: int):
        return cls._raw([[ONE if i == j else ZERO for j in range(size)] for i in range(size)])

    @classmethod
    def diagonal(cls, values: Iterable):
        values = [_as_expr(v) for v in values]
        size = len(values)
        return cls._raw([[values[i] if i == j else ZERO for j in range(size)] for i in range(size)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij) -> Expr:
        i, j = ij
        return self._e[i][j]

    def tolist(self) -> list[list[Expr]]:
        return [list(r) for r in self._e]

    def map(self, fn: Callable[[Expr], Expr]):
        return self._raw([[fn(v) for v in row] for row in self._e])

    def entries(self):
        for i, row in enumerate(self._e):
            for j, v in enumerate(row):
                yield i, j, v

    @property
    def is_zero(self) -> bool:
        return all(v.is_zero for row in self._e for v in row)

    def _check_same(self, other):
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        return self._raw([[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other):
        self._check_same(other)
        return self._raw([[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __neg__(self):
        return self.map(lambda v: -v)

    def scale(self, c) -> "Matrix":
        c = _as_expr(c)
        return self.map(lambda v: v * c)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        if isinstance(other, (Expr, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Expr, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other._e))
        out = []
        for row in self._e:
            new = []
            for col in cols:
                acc = ZERO
                for a, b in zip(row, col):
                    if not a.is_zero and not b.is_zero:
                        acc = acc + a * b
                new.append(acc)
            out.append(new)
        return self._raw(out)

    def commutator(self, other) -> "Matrix":
        return self @ other - other @ self

    def transpose(self):
        return self._raw([list(c) for c in zip(*self._e)])

    def trace(self) -> Expr:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        acc = ZERO
        for i in range(self.rows):
            acc = acc + self._e[i][i]
        return acc

    def inverse(self) -> "Matrix":
        """Gauss-Jordan inverse over the field of rational functions."""
        if not self.is_square:
            raise DimensionError("inverse of a non-square matrix")
        n = self.rows
        a = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self._e)]
        for c in range(n):
            piv = next((r for r in range(c, n) if not a[r][c].is_zero), None)
            if piv is None:
                raise PoleError("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            inv = a[c][c].reciprocal()
            a[c] = [v * inv for v in a[c]]
            for r in range(n):
                if r != c and not a[r][c].is_zero:
                    f = a[r][c]
                    a[r] = [v - f * w for v, w in zip(a[r], a[c])]
        return self._raw([row[n:] for row in a])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(a == b for r, s in zip(self._e, other._e) for a, b in zip(r, s))

    def __hash__(self):
        return hash(self._e)

    def to_text(self) -> str:
        return "[" + ", ".join("[" + ", ".join(v.to_text() for v in row) + "]" for row in self._e) + "]"

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()})"
