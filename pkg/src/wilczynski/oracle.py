"""Numerical cross-check of the symbolic invariants.

A solution is integrated with classical RK4, the linearization coefficients
are sampled along it, the sampled linear equation is brought to
Laguerre-Forsyth form numerically (``mu`` removes ``p_n`` in closed form,
``lambda`` removing ``p_{n-1}`` is integrated as an initial value problem) and
the closed-form invariants are evaluated on spline derivatives of the
canonical coefficients.  None of this touches the gauge reduction, so
agreement with ``W_k / c_k`` is an independent confirmation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import make_interp_spline

from .diffring import delta_expr
from .equations import OdeSingle
from .errors import PoleError, PreconditionError
from .expr import ONE, ZERO, Expr, indeterminate_name, jet_name, parse_indeterminate_name
from .linear import LinearOde, lf_coefficient, proportionality_constant, transform_coefficients
from .nonlinear import generalized_invariants


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid: np.ndarray
    states: np.ndarray
    step: float
    method: str = "rk4"

    @property
    def order(self) -> int:
        return self.states.shape[1]


def _check_finite(values, x) -> None:
    if not np.all(np.isfinite(values)):
        raise PoleError(f"right-hand side is not finite near x = {float(np.ravel(x)[0]):.6g}")


def _rk4(field: Callable, x0: float, s0: np.ndarray, h: float, steps: int):
    grid = x0 + h * np.arange(steps + 1)
    states = np.empty((steps + 1, len(s0)))
    states[0] = s0
    s = np.array(s0, dtype=float)
    for i in range(steps):
        x = grid[i]
        k1 = field(x, s)
        k2 = field(x + h / 2, s + h / 2 * k1)
        k3 = field(x + h / 2, s + h / 2 * k2)
        k4 = field(x + h, s + h * k3)
        s = s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        states[i + 1] = s
    return grid, states


def _steps(span: tuple[float, float], step: float) -> int:
    a, b = span
    if not step > 0 or not b > a:
        raise PreconditionError("need step > 0 and a non-empty span")
    steps = round((b - a) / step)
    if steps < 1 or abs(steps * step - (b - a)) > 1e-9 * max(1.0, abs(b - a)):
        raise PreconditionError("span length must be a whole number of steps")
    return steps


def _concrete(eq: OdeSingle) -> None:
    if eq.parameters:
        raise PreconditionError(f"assign parameters {sorted(eq.parameters)} before integrating")


def integrate(eq: OdeSingle, initial: Sequence[float], span: tuple[float, float], step: float) -> Trajectory:
    """Fixed-step RK4 for ``(y0..yn)' = (y1..yn, f)`` starting at ``span[0]``."""
    _concrete(eq)
    if len(initial) != eq.order:
        raise PreconditionError(f"need {eq.order} initial values (y, ..., y^({eq.n}))")
    f = eq.rhs.compile(["x", *eq.jet_names])

    def field(x, s):
        top = f(x, *s)
        _check_finite(top, x)
        return np.append(s[1:], top)

    grid, states = _rk4(field, float(span[0]), np.asarray(initial, dtype=float), step, _steps(span, step))
    return Trajectory(grid, states, step)


def integrate_variational(
    eq: OdeSingle,
    initial: Sequence[float],
    perturbation: Sequence[float],
    span: tuple[float, float],
    step: float,
) -> tuple[Trajectory, np.ndarray]:
    """Solution together with a solution of its linearization along it."""
    _concrete(eq)
    order = eq.order
    names = ["x", *eq.jet_names]
    f = eq.rhs.compile(names)
    partials = [eq.partial(i).compile(names) for i in range(order)]

    def field(x, s):
        y, v = s[:order], s[order:]
        top = f(x, *y)
        lin = sum(partials[i](x, *y) * v[i] for i in range(order))
        _check_finite([top, lin], x)
        return np.concatenate([y[1:], [top], v[1:], [lin]])

    s0 = np.concatenate([np.asarray(initial, float), np.asarray(perturbation, float)])
    grid, states = _rk4(field, float(span[0]), s0, step, _steps(span, step))
    return Trajectory(grid, states[:, :order], step), states[:, order:]


@dataclass(frozen=True, eq=False)
class SampledLinearOde:
    """Monic coefficients ``p_0 .. p_n`` sampled on ``grid`` (shape ``(n+1, N)``)."""

    grid: np.ndarray
    p: np.ndarray

    @property
    def n(self) -> int:
        return self.p.shape[0] - 1

    @property
    def a(self) -> np.ndarray:
        """Linearization coefficients ``df/dy_i = -p_i``."""
        return -self.p


def sample_linearization(eq: OdeSingle, traj: Trajectory) -> SampledLinearOde:
    names = ["x", *eq.jet_names]
    cols = [traj.grid, *traj.states.T]
    rows = []
    for i in range(eq.order):
        values = np.broadcast_to(eq.partial(i).compile(names)(*cols), traj.grid.shape)
        _check_finite(values, traj.grid)
        rows.append(-values)
    return SampledLinearOde(traj.grid, np.array(rows))


def sample_linear(eq: LinearOde, grid: Sequence[float]) -> SampledLinearOde:
    if not eq.rate == ONE:
        raise PreconditionError("sampling needs coefficients as functions of the equation's own variable")
    grid = np.asarray(grid, dtype=float)
    rows = [np.broadcast_to(c.compile(["x"])(grid), grid.shape) for c in eq.coeffs]
    return SampledLinearOde(grid, np.array(rows, dtype=float))


# ---------------------------------------------------------------------------
# symbolic preparation, once per order


def _l(k: int) -> Expr:
    return Expr.var(f"l{k}")


@dataclass(frozen=True, eq=False)
class _Plan:
    n: int
    u: list[Expr]  # coefficients after the mu-step, in p-jets
    lam_rhs: Expr  # lambda''' in terms of l1, l2 and p-jets
    q: list[Expr]  # Laguerre-Forsyth coefficients q_0..q_{n-2} in l1, l2 and p-jets
    residual: Expr  # new p_{n-1}; vanishes identically once lambda''' = lam_rhs


@lru_cache(maxsize=None)
def _plan(n: int) -> _Plan:
    p = [Expr.var(indeterminate_name(i, 0)) for i in range(n + 1)]
    # mu'/mu = p_n/(n+1) removes the y^(n) term
    u = transform_coefficients(p, delta_expr, ONE, p[n] / (n + 1))
    if not u[n].is_zero:
        raise ArithmeticError("mu-step failed to remove p_n")

    # lambda-step on an equation with p_n = 0, keeping it zero with mu = lambda'^(n/2)
    def derive(e: Expr, rules: dict[str, Expr] | None = None) -> Expr:
        def rule(name):
            if rules and name in rules:
                return rules[name]
            ij = parse_indeterminate_name(name)
            if ij is not None:
                return Expr.var(indeterminate_name(ij[0], ij[1] + 1))
            if name.startswith("l") and name[1:].isdigit():
                return _l(int(name[1:]) + 1)
            return None

        return e.derive(rule)

    base = p[:n] + [ZERO]
    v = transform_coefficients(base, derive, _l(1), _l(2) * Fraction(n, 2) / _l(1))
    if not v[n].is_zero:
        raise ArithmeticError("lambda-step reintroduced p_n")
    l3 = "l3"
    coef = v[n - 1].diff(l3)
    if coef.is_zero or not coef.diff(l3).is_zero:
        raise ArithmeticError("p_{n-1} condition is not linear in lambda'''")
    lam_rhs = -v[n - 1].subs({l3: ZERO}) / coef

    # eliminate lambda^(k), k >= 3
    jets = {3: lam_rhs}
    top = max((int(nm[1:]) for e in v for nm in e.variables if nm.startswith("l") and nm[1:].isdigit()), default=2)
    for k in range(4, top + 1):
        jets[k] = derive(jets[k - 1], {"l2": lam_rhs})
    elim = {f"l{k}": jets[k] for k in jets}
    q = [v[i].subs(elim) for i in range(n - 1)]
    residual = v[n - 1].subs(elim)

    # express everything through the original p-jets
    def through_p(e: Expr) -> Expr:
        mapping = {}
        for name in e.variables:
            ij = parse_indeterminate_name(name)
            if ij is None:
                continue
            w = u[ij[0]]
            for _ in range(ij[1]):
                w = delta_expr(w)
            mapping[name] = w
        return e.subs(mapping)

    return _Plan(n, u, through_p(lam_rhs), [through_p(e) for e in q], residual)


def _jet_names(exprs: Sequence[Expr]) -> list[tuple[int, int]]:
    found = set()
    for e in exprs:
        for name in e.variables:
            ij = parse_indeterminate_name(name)
            if ij is not None:
                found.add(ij)
    return sorted(found)


# ---------------------------------------------------------------------------
# numeric Laguerre-Forsyth invariants


@dataclass(frozen=True, eq=False)
class LfSamples:
    """Classical invariants ``theta_k`` pulled back to the original variable."""

    grid: np.ndarray
    values: dict[int, np.ndarray]
    lam: np.ndarray
    lam_prime: np.ndarray
    q: np.ndarray


def _splines(grid: np.ndarray, rows: np.ndarray, degree: int):
    return [make_interp_spline(grid, r, k=degree) for r in rows]


def numeric_lf_invariants(
    slin: SampledLinearOde,
    *,
    stride: int | None = None,
    degree: int = 9,
    substeps: int = 8,
) -> LfSamples:
    """Evaluate ``theta_3 .. theta_{n+1}`` along sampled coefficients.

    ``stride`` thins the grid before spline fitting (to about 0.01 spacing by
    default); high derivatives of interpolants on very fine grids amplify
    roundoff.  ``lambda`` is integrated with RK4 using ``substeps`` steps per
    thinned grid interval, from ``lambda(x0) = x0, lambda' = 1, lambda'' = 0``.
    """
    n = slin.n
    if n < 2:
        raise PreconditionError("Laguerre-Forsyth invariants need order >= 3")
    grid = np.asarray(slin.grid, float)
    if stride is None:
        spacing = (grid[-1] - grid[0]) / max(len(grid) - 1, 1)
        stride = max(1, int(round(0.01 / spacing)))
    g = grid[::stride]
    rows = slin.p[:, ::stride]
    if len(g) < 2 * degree + 2:
        raise PreconditionError(f"grid too coarse: {len(g)} points after thinning, need {2 * degree + 2}")
    plan = _plan(n)
    splines = _splines(g, rows, degree)
    deriv_cache: dict[tuple[int, int], object] = {}

    def jet_values(i: int, j: int, x):
        key = (i, j)
        if key not in deriv_cache:
            deriv_cache[key] = splines[i].derivative(j) if j else splines[i]
        return deriv_cache[key](x)

    lam_jets = _jet_names([plan.lam_rhs])
    lam_names = ["l1", "l2", *(indeterminate_name(i, j) for i, j in lam_jets)]
    lam_fn = plan.lam_rhs.compile(lam_names)

    # lambda''' along the thinned grid with substeps; coefficient jets from splines
    h = (g[1] - g[0]) / substeps
    fine = g[0] + h * np.arange((len(g) - 1) * substeps + 1)
    half = fine[:-1] + h / 2
    at_fine = [jet_values(i, j, fine) for i, j in lam_jets]
    at_half = [jet_values(i, j, half) for i, j in lam_jets]
    state = np.array([g[0], 1.0, 0.0])
    out = np.empty((len(fine), 3))
    out[0] = state

    def field(s, jets):
        l3 = lam_fn(s[1], s[2], *jets)
        return np.array([s[1], s[2], float(l3)])

    for t in range(len(fine) - 1):
        j0 = [a[t] for a in at_fine]
        jm = [a[t] for a in at_half]
        j1 = [a[t + 1] for a in at_fine]
        k1 = field(state, j0)
        k2 = field(state + h / 2 * k1, jm)
        k3 = field(state + h / 2 * k2, jm)
        k4 = field(state + h * k3, j1)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[t + 1] = state
    lam, l1, l2 = out[::substeps].T
    if np.any(l1 <= 0):
        raise PreconditionError("lambda' reached zero; the reparametrization degenerates")

    q_jets = _jet_names(plan.q)
    q_names = ["l1", "l2", *(indeterminate_name(i, j) for i, j in q_jets)]
    jet_arrays = [jet_values(i, j, g) for i, j in q_jets]
    q = np.array([np.broadcast_to(e.compile(q_names)(l1, l2, *jet_arrays), g.shape) for e in plan.q])

    # classical invariants in the new variable, then pulled back
    qs = _splines(lam, q, degree)
    values = {}
    for k in range(3, n + 2):
        acc = np.zeros_like(g)
        for j in range(1, k - 1):
            spline = qs[n - k + j]
            d = spline.derivative(j - 1) if j > 1 else spline
            acc = acc + float(lf_coefficient(n, k, j)) * d(lam)
        values[k] = acc * l1**k
    return LfSamples(g, values, lam, l1, q)


# ---------------------------------------------------------------------------
# comparison with the symbolic invariants


@dataclass(frozen=True)
class Discrepancy:
    k: int
    constant: object  # Fraction or None
    mode: str  # "relative", "absolute" or "skipped"
    error: float
    scale: float


def _interior(m: int, trim: float) -> slice:
    cut = int(np.ceil(trim * m))
    return slice(cut, m - cut)


def cross_validate(
    eq: OdeSingle,
    initial: Sequence[float],
    span: tuple[float, float] = (0.0, 1.0),
    step: float = 1e-3,
    *,
    trim: float = 0.15,
) -> dict[int, Discrepancy]:
    """Compare ``W_k`` with ``c_k * theta_k`` computed numerically along a solution.

    Errors are sup-norms over interior points (``trim`` of the span is cut
    at each end, where spline derivatives are least accurate).  For an
    identically vanishing ``W_k`` the absolute error is reported, otherwise
    the error relative to the sup-norm of ``W_k``.  Weights without a
    proportionality constant are skipped.
    """
    traj = integrate(eq, initial, span, step)
    slin = sample_linearization(eq, traj)
    lf = numeric_lf_invariants(slin)
    stride = int(round((lf.grid[1] - lf.grid[0]) / step))
    states = traj.states[::stride]
    inv = generalized_invariants(eq)
    names = ["x", *eq.jet_names]
    sel = _interior(len(lf.grid), trim)
    out = {}
    for k, entry in inv.entries.items():
        c = proportionality_constant(eq.n, k)
        if c is None:
            out[k] = Discrepancy(k, None, "skipped", float("nan"), float("nan"))
            continue
        symbolic = np.broadcast_to(entry.value.compile(names)(lf.grid, *states.T), lf.grid.shape)
        numeric = float(c) * lf.values[k]
        diff = float(np.max(np.abs(symbolic[sel] - numeric[sel])))
        scale = float(np.max(np.abs(symbolic[sel])))
        if entry.is_zero:
            out[k] = Discrepancy(k, c, "absolute", diff, scale)
        else:
            out[k] = Discrepancy(k, c, "relative", diff / scale if scale else float("inf"), scale)
    return out


# equations and initial data (y, y', ...) used for cross-validation, keyed by n = order - 1
VALIDATION_CORPUS: dict[int, list[tuple[str, str]]] = {
    2: [
        ("y''' = 0", "0,1,0.5"),
        ("y''' = y'^3", "0,0.5,0.2"),
        ("y''' = y*y'' + x", "0.1,0.3,-0.2"),
        ("y''' = y''^2", "0,0.2,0.3"),
        ("y''' = x^2*y'' - y' + 2*y", "1,0,0"),
        ("y''' = y'*y''/(1 + y^2)", "0.2,0.5,0.1"),
        ("y''' = 3*y''^2/(2*y')", "0,1,0.4"),
        ("y''' = y''^3 + x*y", "0,0.1,0.5"),
        ("y''' = (y'' + y)/(2 + x)", "0.5,0.1,0.2"),
        ("y''' = y^2*y' - y''", "0.3,-0.2,0.4"),
    ],
    3: [
        ("y^(4) = 0", "0,1,0,0.5"),
        ("y^(4) = y'''^2 + y*y'", "0,0.3,0.1,0.2"),
        ("y^(4) = 4*y'''^2/(3*y'')", "0,0,1,0.3"),
        ("y^(4) = x*y''' + y''^2", "0.1,0,0.2,0.1"),
        ("y^(4) = y''*y''' - y", "0,0.5,0.2,-0.1"),
        ("y^(4) = y'''/(1 + x^2) + y'^2", "0,0.2,0.1,0.3"),
        ("y^(4) = y'''^3 + y'", "0.2,0.1,0.1,0.2"),
        ("y^(4) = (y''^2 + y''')/(3 + y)", "0.1,0.1,0.2,0.1"),
        ("y^(4) = x^3*y - y''*y'", "0,0.4,0,0.1"),
        ("y^(4) = y*y'*y''*y''' + 1", "0.2,0.3,0.1,0.2"),
    ],
    4: [
        ("y^(5) = 0", "0,0,1,0,0.2"),
        ("y^(5) = (45*y''*y'''*y^(4) - 40*y'''^3)/(9*y''^2)", "0,0.3,1,0.5,0.2"),
        ("y^(5) = 5*y^(4)^2/(4*y''')", "0,0,0,1,0.2"),
        ("y^(5) = y^(4)*y' + y''^2 + x*y", "0,0.2,0.1,0.3,-0.1"),
        ("y^(5) = y^(4)^2 + y", "0.1,0,0.2,0.1,0.1"),
        ("y^(5) = y'''*y'' - x*y^(4)", "0,0.3,0.2,0.1,0"),
        ("y^(5) = y^(4)/(1 + y^2) + y'^3", "0.2,0.1,0.1,0.2,0.1"),
        ("y^(5) = y'''^2 - y''*y'", "0,0.1,0.3,0.2,0.1"),
        ("y^(5) = x^2*y''' + y^(4)*y''", "0,0.2,0.1,0.1,0.3"),
        ("y^(5) = y^(4)^3/(2 + x) + y*y'", "0.1,0.2,0.1,0.2,0.2"),
    ],
}
