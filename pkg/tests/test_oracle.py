from fractions import Fraction

import numpy as np
import pytest

from wilczynski.equations import parse_equation
from wilczynski.errors import PoleError, PreconditionError
from wilczynski.examples import gen_quadric, gen_trivial
from wilczynski.expr import ZERO, Expr
from wilczynski.linear import LinearOde, lf_invariants
from wilczynski.oracle import (
    VALIDATION_CORPUS,
    cross_validate,
    integrate,
    integrate_variational,
    numeric_lf_invariants,
    sample_linear,
    sample_linearization,
)

x = Expr.var("x")
GRID = np.linspace(0.0, 1.0, 1001)


def test_rk4_is_exact_on_quadratics():
    traj = integrate(gen_trivial(3), [0, 0, 2], (0.0, 1.0), 1e-3)
    assert np.max(np.abs(traj.states[:, 0] - traj.grid**2)) < 1e-12
    assert traj.order == 3


def test_rk4_fourth_order():
    eq = parse_equation("y''' = y")

    def err(h):
        t = integrate(eq, [1, 1, 1], (0.0, 1.0), h)
        return abs(t.states[-1, 0] - np.e)

    ratio = err(0.02) / err(0.01)
    assert 12 < ratio < 20


def test_integrate_errors():
    with pytest.raises(PoleError):
        integrate(parse_equation("y''' = 1/y"), [0, 1, 0], (0.0, 1.0), 1e-3)
    with pytest.raises(PreconditionError):
        integrate(gen_trivial(3), [0, 0], (0.0, 1.0), 1e-3)
    with pytest.raises(PreconditionError):
        integrate(gen_trivial(3), [0, 0, 0], (0.0, 1.0), 0.3)
    with pytest.raises(PreconditionError):
        integrate(parse_equation("y''' = a*y", params={"a"}), [0, 0, 0], (0.0, 1.0), 1e-3)


def test_sampled_linearization():
    eq = gen_trivial(4)
    slin = sample_linearization(eq, integrate(eq, [0, 1, 0, 0], (0.0, 1.0), 1e-2))
    assert np.all(slin.p == 0)
    lin = parse_equation("y''' = -x*y'' - 2*y' + x^2*y")
    traj = integrate(lin, [1, 0, 0], (0.0, 1.0), 1e-2)
    slin = sample_linearization(lin, traj)
    assert np.allclose(slin.p[0], -traj.grid**2)
    assert np.allclose(slin.p[1], 2)
    assert np.allclose(slin.a[2], -traj.grid)


def test_variational_equation_matches_finite_differences():
    eq = parse_equation("y''' = y'^2 + y*y''")
    ic = np.array([0.1, 0.2, 0.3])
    dv = np.array([0.5, -1.0, 2.0])
    eps = 1e-6
    base, v = integrate_variational(eq, ic, dv, (0.0, 1.0), 1e-3)
    bumped = integrate(eq, ic + eps * dv, (0.0, 1.0), 1e-3)
    fd = (bumped.states - base.states) / eps
    assert np.max(np.abs(fd - v)) / np.max(np.abs(v)) < 1e-4


def test_numeric_lf_trivial():
    out = numeric_lf_invariants(sample_linear(LinearOde((0, 0, 0, 0)), GRID))
    for k, vals in out.values.items():
        assert np.max(np.abs(vals)) < 1e-8


def test_numeric_lf_on_canonical_input_matches_closed_form():
    q = [1 + x**2, x / 2]
    out = numeric_lf_invariants(sample_linear(LinearOde.laguerre_forsyth(q), GRID))
    exact = lf_invariants(q)
    assert np.allclose(out.lam, out.grid, atol=1e-12)
    inner = slice(15, -15)
    for k, e in exact.items():
        ref = np.broadcast_to(e.compile(["x"])(out.grid), out.grid.shape)
        assert np.max(np.abs(out.values[k][inner] - ref[inner])) < 1e-9


def test_numeric_lf_order_three_linear_coefficient():
    out = numeric_lf_invariants(sample_linear(LinearOde((x, 0, 0)), GRID))
    assert np.allclose(out.values[3], 12 * out.grid, atol=1e-9)


def test_numeric_lf_needs_enough_points():
    with pytest.raises(PreconditionError):
        numeric_lf_invariants(sample_linear(LinearOde((x, 0, 0)), np.linspace(0, 1, 11)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_numeric_invariants_are_covariant_under_affine_maps(n):
    # t = a + b x turns p_i(x) into p_i((t - a)/b) * b^(i-n-1); theta_k picks up b^k
    # both grids are thinned alike so the spline layouts correspond
    rng = np.random.default_rng(7 + n)
    for _ in range(4):
        coeffs = tuple(int(c0) + int(c1) * x for c0, c1 in rng.integers(-3, 4, size=(n + 1, 2)))
        a, b = Fraction(int(rng.integers(-2, 3))), Fraction(int(rng.integers(2, 4)), 2)
        moved = tuple(e.subs({"x": (x - a) / b}) * b ** (i - n - 1) for i, e in enumerate(coeffs))
        ref = numeric_lf_invariants(sample_linear(LinearOde(coeffs), GRID), stride=10)
        new = numeric_lf_invariants(sample_linear(LinearOde(moved), float(a) + float(b) * GRID), stride=10)
        inner = slice(15, -15)
        for k in ref.values:
            lhs = new.values[k][inner] * float(b) ** k
            rhs = ref.values[k][inner]
            err = float(np.max(np.abs(lhs - rhs)))
            bound = 1e-9 * max(1.0, float(np.max(np.abs(rhs))))
            assert err < bound, f"weight {k}: error {err:.3e}, bound {bound:.3e}"


def test_cross_validate_examples():
    d = cross_validate(gen_trivial(4), [0, 1, 0, 1])
    assert all(v.mode == "absolute" and v.error < 1e-8 for v in d.values())
    d = cross_validate(gen_quadric(), [0, 0.3, 1, 0.5, 0.2])
    assert all(v.mode == "absolute" and v.error < 1e-6 for v in d.values())
    d = cross_validate(parse_equation("y''' = y'^3"), [0, 0.5, 0.2])
    assert d[3].mode == "relative" and d[3].error < 1e-5


def test_cross_validate_skips_weights_without_constant():
    d = cross_validate(parse_equation("y^(6) = y^(5)*y' + y"), [0, 0.1, 0.2, 0.1, 0.1, 0.2], step=1e-3)
    assert d[6].mode == "skipped"
    assert d[3].error < 1e-5


def test_corpus_shape():
    assert sorted(VALIDATION_CORPUS) == [2, 3, 4]
    for n, eqs in VALIDATION_CORPUS.items():
        assert len(eqs) == 10
        for text, ic in eqs:
            assert parse_equation(text).n == n
            assert len(ic.split(",")) == n + 1
