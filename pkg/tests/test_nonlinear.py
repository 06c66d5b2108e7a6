import pytest

from wilczynski.equations import OdeSingle, parse_equation
from wilczynski.errors import PreconditionError
from wilczynski.examples import gen_hankel, gen_legendrian7, gen_quadric, gen_trivial
from wilczynski.expr import ZERO, Expr
from wilczynski.linear import LinearOde, linear_invariants
from wilczynski.nonlinear import (
    extra_conditions,
    generalized_invariants,
    linearization_coeffs,
    point_transform,
    trivializability_check,
)

x, y = Expr.var("x"), Expr.var("y0")


def test_linearization_coeffs():
    assert all(a.is_zero for a in linearization_coeffs(gen_trivial(4)))
    a = linearization_coeffs(parse_equation("y''' = y''^2"))
    assert a == [ZERO, ZERO, 2 * Expr.var("y2")]
    lin = parse_equation("y''' = -x*y'' - 3*y' + x^2*y")
    assert linearization_coeffs(lin) == [x**2, Expr.const(-3), -x]


def test_linear_equations_agree_with_linear_theory():
    coeffs = (x**2 + 1, 3 * x, x - 2, Expr.const(1))
    rhs = -sum((c * Expr.var(f"y{i}") for i, c in enumerate(coeffs)), ZERO)
    eq = OdeSingle(4, rhs)
    assert generalized_invariants(eq).values() == linear_invariants(LinearOde(coeffs))


def test_keys_and_flags():
    inv = generalized_invariants(parse_equation("y^(5) = y'^3"))
    assert sorted(inv.entries) == [3, 4, 5]
    assert inv[4].weight == 4
    assert not inv.all_zero


def test_cubic_nonlinearity_value():
    inv = generalized_invariants(parse_equation("y''' = y'^3"))
    assert inv[3].value == Expr.const(3) / 4 * Expr.var("y1") * Expr.var("y2")


def test_order_two_has_no_invariants():
    with pytest.raises(PreconditionError):
        generalized_invariants(parse_equation("y'' = y'^3"))


@pytest.mark.parametrize("order", range(3, 7))
def test_trivial_equation(order):
    report = trivializability_check(gen_trivial(order))
    assert report.wilczynski_vanish
    assert report.trivializable


def test_quartic_second_derivative_is_not_trivializable():
    report = trivializability_check(parse_equation("y''' = y''^4"))
    assert report.extra_conditions[0].value == 24
    assert not report.trivializable


def test_condition_tables():
    assert [c.name for c in extra_conditions(gen_trivial(4))] == ["f_333", "6*f_233 + f_33^2"]
    assert [c.name for c in extra_conditions(gen_trivial(6))] == ["f_55", "f_45"]
    assert [c.name for c in extra_conditions(gen_trivial(8))] == ["f_77", "f_76", "f_66"]


def test_quadric_conditions():
    report = trivializability_check(gen_quadric())
    assert report.wilczynski_vanish
    assert report.extra_conditions[0].is_zero
    assert report.extra_conditions[1].value == Expr.const(5) / 3 / Expr.var("y2") ** 2
    assert not report.trivializable


@pytest.mark.parametrize("order", [3, 4, 5])
def test_hodograph_keeps_trivial_equation_trivial(order):
    swapped = point_transform(gen_trivial(order), y, x)
    assert not swapped.rhs.is_zero
    assert generalized_invariants(swapped).all_zero
    assert trivializability_check(swapped).trivializable


def test_translation_and_projective_maps_preserve_vanishing():
    for eq in (gen_trivial(4), gen_quadric()):
        moved = point_transform(eq, x + 3, y)
        assert generalized_invariants(moved).all_zero
        proj = point_transform(eq, x / (1 + x), y / (1 + x))
        assert generalized_invariants(proj).all_zero


def test_point_transform_maps_nonzero_invariant_to_nonzero():
    eq = parse_equation("y''' = y'^3")
    moved = point_transform(eq, y, x)
    assert not generalized_invariants(moved).all_zero


def test_point_transform_rejects_degenerate_maps():
    with pytest.raises(PreconditionError):
        point_transform(gen_trivial(3), Expr.const(1), y)


@pytest.mark.parametrize("text", ["y''' = y'^3 + y''^2", "y^(4) = x*y'''^2 + y"])
def test_scaling_covariance(text):
    # new x = t * old x, so new y_k = y_k / t^k and W_k picks up t^k
    eq = parse_equation(text)
    t = Expr.const(3)
    moved = point_transform(eq, x / t, y)
    back = {"x": t * x, **{f"y{k}": Expr.var(f"y{k}") / t**k for k in range(eq.order)}}
    old = generalized_invariants(eq)
    new = generalized_invariants(moved)
    for k in old.entries:
        assert new[k].value.subs(back) * t**k == old[k].value
