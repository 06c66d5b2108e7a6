"""Wilczynski invariants of linear equations.

The gl(2) module ``V_n = S^n(R^2)`` has basis ``E_i = v1^(n-i) v2^i`` of degree
``-n-1+i``.  A matrix entry at (row ``r``, column ``c``) maps ``E_c`` to
``E_r`` and so has degree ``r - c``.  The companion connection of a monic
linear equation is normalized degree by degree with lower-triangular gauge
transformations until only ``-X``, ``Z``, ``Y`` and the powers ``Y^k`` remain;
the coefficients of ``Y^2 .. Y^n`` are the invariants ``thetabar_3 ..
thetabar_{n+1}`` as universal differential polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .deadline import Deadline, check
from .diffring import DiffMatrix, DiffPoly, delta_expr
from .errors import PoleError, PreconditionError
from .expr import ONE, ZERO, Expr, indeterminate_name, parse_indeterminate_name
from .matrix import Matrix


# ---------------------------------------------------------------------------
# the representation


@dataclass(frozen=True, eq=False)
class Gl2Rep:
    """Matrices of ``X = v1 d/dv2``, ``H``, ``Y = v2 d/dv1`` and ``Z`` on ``V_n``."""

    n: int
    X: Matrix
    H: Matrix
    Y: Matrix
    Z: Matrix
    _ypow: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.n + 1

    def degree(self, i: int) -> int:
        return -self.n - 1 + i

    def y_power(self, k: int) -> Matrix:
        if k not in self._ypow:
            m = Matrix.identity(self.size)
            for _ in range(k):
                m = self.Y @ m
            self._ypow[k] = m
        return self._ypow[k]

    def y_power_entry(self, k: int, c: int) -> int:
        """Entry of ``Y^k`` at (``c + k``, ``c``): ``(n-c)(n-c-1)...(n-c-k+1)``."""
        return math.prod(self.n - c - t for t in range(k))


@lru_cache(maxsize=None)
def gl2_rep(n: int) -> Gl2Rep:
    if n < 1:
        raise PreconditionError("the representation needs n >= 1")
    size = n + 1
    X = [[0] * size for _ in range(size)]
    Y = [[0] * size for _ in range(size)]
    H = [[0] * size for _ in range(size)]
    for c in range(size):
        # X(E_c) = c E_{c-1};  Y(E_c) = (n-c) E_{c+1};  H(E_c) = (n-2c) E_c
        if c >= 1:
            X[c - 1][c] = c
        if c < n:
            Y[c + 1][c] = n - c
        H[c][c] = n - 2 * c
    Z = [[n if i == j else 0 for j in range(size)] for i in range(size)]
    return Gl2Rep(n, Matrix(X), Matrix(H), Matrix(Y), Matrix(Z))


def component(m: Matrix, k: int) -> Matrix:
    """Degree-``k`` part: the entries on the ``k``-th subdiagonal."""
    return m._raw([[m[i, j] if i - j == k else ZERO for j in range(m.cols)] for i in range(m.rows)])


def pure_degree(m: Matrix) -> int | None:
    degrees = {i - j for i, j, v in m.entries() if not v.is_zero}
    if len(degrees) > 1:
        raise PreconditionError(f"matrix mixes degrees {sorted(degrees)}")
    return degrees.pop() if degrees else None


# ---------------------------------------------------------------------------
# gl_k = <K> + Im ad X


def _solve_rational(a: list[list[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ArithmeticError("singular constant system; the direct-sum decomposition failed")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [v - f * w for v, w in zip(m[r], m[c])]
    return [row[n:] for row in m]


@lru_cache(maxsize=None)
def _split_inverse(n: int, k: int) -> tuple[tuple[Fraction, ...], ...]:
    """Inverse of the constant system ``A = u0 K + [X, sum u_t E_t]`` on degree ``k``.

    ``K`` is ``Y^k`` for ``k >= 1`` and ``Z`` for ``k = 0``; ``E_t`` is the
    elementary matrix at (``t+k+1``, ``t``).  Equations are indexed by the
    degree-``k`` positions (``c+k``, ``c``).
    """
    rep = gl2_rep(n)
    size = n + 1 - k
    cols = []
    if k == 0:
        cols.append([Fraction(n)] * size)
    else:
        cols.append([Fraction(rep.y_power_entry(k, c)) for c in range(size)])
    for t in range(n - k):
        a, b = t + k + 1, t
        col = [Fraction(0)] * size
        # [X, e_ab] = a e_{a-1,b} - (b+1) e_{a,b+1}
        col[b] += a
        col[b + 1] -= b + 1
        cols.append(col)
    matrix = [[cols[u][row] for u in range(size)] for row in range(size)]
    return tuple(tuple(r) for r in _solve_rational(matrix))


def _split(n: int, k: int, entries: Sequence[Expr]) -> tuple[Expr, list[Expr]]:
    inv = _split_inverse(n, k)
    sol = []
    for row in inv:
        acc = ZERO
        for coeff, e in zip(row, entries):
            if coeff and not e.is_zero:
                acc = acc + e * coeff
        sol.append(acc)
    return sol[0], sol[1:]


def ad_split(rep: Gl2Rep, k: int, A: Matrix) -> tuple[Expr, DiffMatrix]:
    """Write a degree-``k`` matrix as ``c Y^k + [X, B]`` with ``B`` of degree ``k + 1``.

    ``k = 0`` is also accepted, with ``Z`` in place of ``Y^0``.
    """
    n = rep.n
    if not 0 <= k <= n:
        raise PreconditionError(f"degree {k} out of range for n = {n}")
    if A.shape != (n + 1, n + 1):
        raise PreconditionError("matrix size does not match V_n")
    deg = pure_degree(A)
    if deg is not None and deg != k:
        raise PreconditionError(f"matrix has degree {deg}, expected {k}")
    coef, bs = _split(n, k, [A[c + k, c] for c in range(n + 1 - k)])
    rows = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for t, b in enumerate(bs):
        rows[t + k + 1][t] = b
    return coef, DiffMatrix._raw(rows)


# ---------------------------------------------------------------------------
# linear equations


@dataclass(frozen=True)
class LinearOde:
    """Monic ``y^(n+1) + p_n y^(n) + ... + p_0 y = 0``.

    Coefficients are expressions in ``x`` (or the universal indeterminates).
    The equation's independent variable ``t`` may differ from ``x``:
    ``d/dt = rate * d/dx``.  This is how :func:`transform_linear` represents
    coefficients after a change of the independent variable without having to
    invert it.
    """

    coeffs: tuple[Expr, ...]
    rate: Expr = ONE

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(c if isinstance(c, Expr) else Expr.const(c) for c in self.coeffs))
        if not isinstance(self.rate, Expr):
            object.__setattr__(self, "rate", Expr.const(self.rate))
        if len(self.coeffs) < 2:
            raise PreconditionError("a linear equation needs order >= 2")
        if self.rate.is_zero:
            raise PreconditionError("rate must be nonzero")

    @classmethod
    def universal(cls, n: int) -> "LinearOde":
        return cls(tuple(Expr.var(indeterminate_name(i, 0)) for i in range(n + 1)))

    @classmethod
    def laguerre_forsyth(cls, q: Sequence[Expr]) -> "LinearOde":
        """``y^(n+1) + q_{n-2} y^(n-2) + ... + q_0 y = 0``."""
        return cls(tuple(q) + (ZERO, ZERO))

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def _rule(self, name: str):
        if name == "x":
            return self.rate
        ij = parse_indeterminate_name(name)
        if ij is not None:
            return Expr.var(indeterminate_name(ij[0], ij[1] + 1))
        return None

    def derivative(self, e: Expr) -> Expr:
        return e.derive(self._rule)

    def coefficient_jet(self, i: int, j: int) -> Expr:
        e = self.coeffs[i]
        for _ in range(j):
            e = self.derivative(e)
        return e


def companion_connection(eq: LinearOde) -> DiffMatrix:
    """``-1`` on the superdiagonal, ``p_0 .. p_n`` on the bottom row."""
    n = eq.n
    rows = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        rows[i][i + 1] = Expr.const(-1)
    rows[n] = list(eq.coeffs)
    return DiffMatrix._raw(rows)


def _unipotent_inverse(b: Matrix) -> Matrix:
    """``(I + B)^-1`` for strictly lower-triangular ``B``."""
    size = b.rows
    inv = Matrix.identity(size)
    term = Matrix.identity(size)
    neg = -b
    for _ in range(size):
        term = term @ neg
        if term.is_zero:
            break
        inv = inv + term
    return DiffMatrix._raw(inv.tolist())


@dataclass(frozen=True, eq=False)
class ReducedConnection:
    """Outcome of the gauge reduction for order ``n + 1``.

    ``gauge`` is the accumulated ``C`` with
    ``C^-1 omega C + C^-1 delta(C) = -X + alpha H + beta Z + gamma Y + sum thetabar_{i+1} Y^i``.
    """

    n: int
    alpha: DiffPoly
    beta: DiffPoly
    gamma: DiffPoly
    thetabar: dict[int, DiffPoly]
    gauge: DiffMatrix
    connection: DiffMatrix
    reduced: DiffMatrix

    def normal_form(self) -> Matrix:
        rep = gl2_rep(self.n)
        m = (-rep.X) + rep.H.scale(self.alpha.expr) + rep.Z.scale(self.beta.expr) + rep.Y.scale(self.gamma.expr)
        for k, th in sorted(self.thetabar.items()):
            m = m + rep.y_power(k - 1).scale(th.expr)
        return m

    def reassembly_residual(self) -> Matrix:
        c = self.gauge
        cinv = c.inverse()
        lhs = cinv @ self.connection @ c + cinv @ c.delta()
        return lhs - self.normal_form()

    def verify(self) -> bool:
        return self.reassembly_residual().is_zero


_REDUCTIONS: dict[int, ReducedConnection] = {}


def seashi_reduce(n: int, *, deadline: Deadline | None = None) -> ReducedConnection:
    """Universal gauge reduction of the companion connection of order ``n + 1``.

    The constant diagonal gauge ``diag(0!, 1!, ..., n!)`` turns the
    superdiagonal into ``-X``.  Then for each degree ``k = 0 .. n-1`` the
    degree-``k`` component is split as ``K + [X, B]`` (``K`` in ``<Z>`` or
    ``<Y^k>``) and the gauge ``I + B`` removes ``[X, B]``; it only disturbs
    degrees ``>= k``, so one increasing pass suffices.  The ``H`` part is
    absorbed at degree 0, hence ``alpha = 0``.  Results are cached per ``n``.
    """
    if n < 2:
        raise PreconditionError("the reduction needs n >= 2 (order >= 3)")
    if n in _REDUCTIONS:
        return _REDUCTIONS[n]
    rep = gl2_rep(n)
    size = n + 1
    omega0 = companion_connection(LinearOde.universal(n))
    diag = [Fraction(math.factorial(i)) for i in range(size)]
    gauge = DiffMatrix.diagonal(diag)
    omega = DiffMatrix._raw([[omega0[i, j] * (diag[j] / diag[i]) for j in range(size)] for i in range(size)])

    for k in range(n):
        check(deadline, f"reduction step {k} of order {n + 1}")
        _, b = ad_split(rep, k, component(omega, k))
        if b.is_zero:
            continue
        g = DiffMatrix.identity(size) + b
        ginv = _unipotent_inverse(b)
        omega = ginv @ (omega @ g + b.delta())
        gauge = gauge @ g
    omega = DiffMatrix._raw(omega.tolist())

    # every graded piece is now a multiple of its target element
    if (component(omega, -1) + rep.X).is_zero is False:
        raise ArithmeticError("degree -1 part is not -X")
    beta = omega[0, 0] / n
    if not (component(omega, 0) - rep.Z.scale(beta)).is_zero:
        raise ArithmeticError("degree 0 part is not a multiple of Z")
    coeffs = {}
    for k in range(1, n + 1):
        c = omega[k, 0] / rep.y_power_entry(k, 0)
        if not (component(omega, k) - rep.y_power(k).scale(c)).is_zero:
            raise ArithmeticError(f"degree {k} part is not a multiple of Y^{k}")
        coeffs[k] = c
    for i in range(size):
        for j in range(i + 2, size):
            if not omega[i, j].is_zero:
                raise ArithmeticError("reduced connection has entries above the superdiagonal")

    result = ReducedConnection(
        n=n,
        alpha=DiffPoly(ZERO, n),
        beta=DiffPoly(beta, n),
        gamma=DiffPoly(coeffs[1], n),
        thetabar={k + 1: DiffPoly(coeffs[k], n) for k in range(2, n + 1)},
        gauge=gauge,
        connection=omega0,
        reduced=omega,
    )
    _REDUCTIONS[n] = result
    return result


def universal_invariants(n: int, *, deadline: Deadline | None = None) -> dict[int, DiffPoly]:
    """``{k: thetabar_k}`` for ``k = 3 .. n+1``."""
    return dict(seashi_reduce(n, deadline=deadline).thetabar)


def specialize_linear(p: DiffPoly | Expr, eq: LinearOde) -> Expr:
    """Replace ``p_i^(j)`` by the ``j``-th derivative of the concrete coefficient ``p_i``."""
    expr = p.expr if isinstance(p, DiffPoly) else p
    mapping = {}
    for name in expr.variables:
        ij = parse_indeterminate_name(name)
        if ij is None:
            continue
        if ij[0] > eq.n:
            raise PreconditionError(f"{name} has no counterpart for an equation of order {eq.order}")
        mapping[name] = eq.coefficient_jet(*ij)
    return expr.subs(mapping)


def linear_invariants(eq: LinearOde, *, deadline: Deadline | None = None) -> dict[int, Expr]:
    """``thetabar_k`` of a concrete linear equation, ``k = 3 .. n+1``."""
    red = seashi_reduce(eq.n, deadline=deadline)
    out = {}
    for k, th in red.thetabar.items():
        check(deadline, f"specializing thetabar_{k}")
        out[k] = specialize_linear(th, eq)
    return out


# ---------------------------------------------------------------------------
# Laguerre-Forsyth form


def lf_coefficient(n: int, k: int, j: int) -> Fraction:
    """``(-1)^(j+1) (2k-j-1)! (n-k+j)! / ((k-j)! (j-1)!)``."""
    f = math.factorial
    value = Fraction(f(2 * k - j - 1) * f(n - k + j), f(k - j) * f(j - 1))
    return value if j % 2 == 1 else -value


def lf_invariants(q: Sequence[Expr], derivative: Callable[[Expr], Expr] | None = None) -> dict[int, Expr]:
    """Classical invariants of ``y^(n+1) + q_{n-2} y^(n-2) + ... + q_0 y = 0``.

    ``q`` lists ``q_0 .. q_{n-2}``; derivatives default to ``d/dx``.
    """
    q = [v if isinstance(v, Expr) else Expr.const(v) for v in q]
    if not q:
        raise PreconditionError("need at least one canonical coefficient (order >= 3)")
    n = len(q) + 1
    derivative = derivative or (lambda e: e.diff("x"))
    jets: dict[tuple[int, int], Expr] = {}

    def jet(i, j):
        if (i, j) not in jets:
            jets[(i, j)] = q[i] if j == 0 else derivative(jet(i, j - 1))
        return jets[(i, j)]

    out = {}
    for k in range(3, n + 2):
        acc = ZERO
        for j in range(1, k - 1):
            acc = acc + jet(n - k + j, j - 1) * lf_coefficient(n, k, j)
        out[k] = acc
    return out


# ---------------------------------------------------------------------------
# (x, y) -> (lambda(x), mu(x) y)


def transform_coefficients(
    coeffs: Sequence[Expr],
    derive: Callable[[Expr], Expr],
    lam_prime: Expr,
    mu_log_derivative: Expr,
) -> list[Expr]:
    """Coefficients of the equation satisfied by ``ytilde(lambda) = mu * y``.

    ``derive`` is differentiation in the current independent variable,
    ``lam_prime`` the derivative of ``lambda`` and ``mu_log_derivative`` is
    ``mu'/mu``; only ratios of derivatives of ``mu`` enter the result.  The
    returned coefficients are functions of the old variable.

    Writing ``ytilde^(m) = mu * sum_i c[m][i] y^(i)`` one has
    ``c[m+1][i] = (g c[m][i] + c[m][i]' + c[m][i-1]) / lambda'``; eliminating
    ``y^(n+1)`` with the original equation leaves a triangular system for the
    new coefficients.
    """
    coeffs = list(coeffs)
    n = len(coeffs) - 1
    if lam_prime.is_zero:
        raise PreconditionError("lambda' vanishes identically")
    inv = lam_prime.reciprocal()
    g = mu_log_derivative
    c = [[ONE]]
    for m in range(n + 1):
        prev = c[m]
        new = []
        for i in range(m + 2):
            term = ZERO
            if i <= m:
                term = term + g * prev[i] + derive(prev[i])
            if i >= 1:
                term = term + prev[i - 1]
            new.append(term * inv)
        c.append(new)
    top = c[n + 1]
    r = [top[i] - top[n + 1] * coeffs[i] for i in range(n + 1)]
    out: list[Expr] = [ZERO] * (n + 1)
    for i in reversed(range(n + 1)):
        acc = -r[i]
        for m in range(i + 1, n + 1):
            if not out[m].is_zero:
                acc = acc - out[m] * c[m][i]
        out[i] = acc / c[i][i]
    return out


def transform_linear(eq: LinearOde, lam: Expr, mu: Expr) -> LinearOde:
    """Apply ``(x, y) -> (lambda(x), mu(x) y)`` to a linear equation.

    ``lam`` and ``mu`` are functions of the equation's variable (written in
    ``x``).  The result's coefficients are the new coefficients evaluated at
    ``lambda(x)`` and written in ``x``; its ``rate`` encodes ``d/dlambda``.
    """
    lam = lam if isinstance(lam, Expr) else Expr.const(lam)
    mu = mu if isinstance(mu, Expr) else Expr.const(mu)
    if mu.is_zero:
        raise PreconditionError("mu vanishes identically")
    lam1 = eq.derivative(lam)
    if lam1.is_zero:
        raise PreconditionError("lambda' vanishes identically")
    g = eq.derivative(mu) / mu
    new = transform_coefficients(eq.coeffs, eq.derivative, lam1, g)
    try:
        rate = eq.rate / lam1
    except PoleError:  # pragma: no cover - lam1 checked above
        raise
    return LinearOde(tuple(new), rate)


@lru_cache(maxsize=None)
def proportionality_constant(n: int, k: int) -> Fraction | None:
    """``c`` with ``thetabar_k = c * theta_k`` on every Laguerre-Forsyth equation, if one exists.

    Computed on the universal Laguerre-Forsyth equation; ``None`` when the
    ratio is not constant (weights ``>= 6``, where products of lower
    invariants contribute).
    """
    red = seashi_reduce(n)
    if k not in red.thetabar:
        raise PreconditionError(f"no invariant of weight {k} for order {n + 1}")
    e = red.thetabar[k].expr
    kill = {}
    for name in e.variables:
        i, _ = parse_indeterminate_name(name)
        if i >= n - 1:
            kill[name] = ZERO
    e = e.subs(kill)
    q = [Expr.var(indeterminate_name(i, 0)) for i in range(n - 1)]
    classical = lf_invariants(q, delta_expr)[k]
    ratio = e / classical
    return ratio.constant_value() if ratio.is_constant else None
