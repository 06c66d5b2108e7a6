import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wilczynski.diffring import DiffMatrix, DiffPoly, delta, specialize
from wilczynski.equations import parse_equation
from wilczynski.errors import PreconditionError
from wilczynski.expr import Expr

N = 3


def p(i, j=0):
    return DiffPoly.indeterminate(i, j, N)


diff_polys = st.lists(
    st.tuples(st.integers(-3, 3), st.integers(0, N), st.integers(0, 2), st.integers(0, N), st.integers(0, 2)),
    min_size=1,
    max_size=4,
).map(lambda terms: sum((c * p(i, j) * p(k, l) for c, i, j, k, l in terms), DiffPoly(0, N)))


def test_delta_on_indeterminates():
    assert delta(p(1, 2)) == p(1, 3)
    assert delta(DiffPoly(5, N)).is_zero


@given(diff_polys, diff_polys)
@settings(max_examples=40, deadline=None)
def test_delta_is_a_derivation(a, b):
    assert delta(a * b) == delta(a) * b + a * delta(b)
    assert delta(a + b) == delta(a) + delta(b)


def test_weights():
    e = p(3, 1) * p(2) + p(0)
    # weights: p3' -> 1 + 1, p2 -> 2, p0 -> 4
    assert e.weights() == {4}
    assert e.is_isobaric(4)
    assert not (p(3) + p(0)).is_isobaric(4)


def test_rejects_foreign_symbols():
    with pytest.raises(PreconditionError):
        DiffPoly(Expr.var("x"), N)
    with pytest.raises(PreconditionError):
        DiffPoly(Expr.var("p4_0"), N)
    with pytest.raises(PreconditionError):
        DiffPoly(1 / Expr.var("p1_0"), N)


def test_matrix_delta():
    m = DiffMatrix([[p(0).expr, 0], [1, p(1, 1).expr]])
    assert m.delta() == DiffMatrix([[p(0, 1).expr, 0], [0, p(1, 2).expr]])


def test_specialize_uses_minus_partials_and_total_derivative():
    eq = parse_equation("y^(4) = y'*y''' + x*y")
    assert specialize(p(3), eq) == -Expr.var("y1")
    assert specialize(p(0), eq) == -Expr.var("x")
    assert specialize(p(0, 1), eq) == Expr.const(-1)
    # D(-y') = -y''
    assert specialize(p(3, 1), eq) == -Expr.var("y2")


def test_specialize_order_mismatch():
    with pytest.raises(PreconditionError):
        specialize(p(0), parse_equation("y''' = 0"))
