import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wilczynski.diffring import DiffPoly, delta_expr
from wilczynski.errors import PreconditionError
from wilczynski.expr import ZERO, Expr
from wilczynski.linear import (
    LinearOde,
    ad_split,
    companion_connection,
    component,
    gl2_rep,
    lf_coefficient,
    lf_invariants,
    linear_invariants,
    proportionality_constant,
    seashi_reduce,
    specialize_linear,
    transform_linear,
)
from wilczynski.matrix import Matrix

x = Expr.var("x")


@pytest.mark.parametrize("n", range(1, 11))
def test_gl2_relations(n):
    r = gl2_rep(n)
    assert r.X.commutator(r.Y) == r.H
    assert r.H.commutator(r.X) == r.X.scale(2)
    assert r.H.commutator(r.Y) == r.Y.scale(-2)
    for m in (r.X, r.Y, r.H):
        assert r.Z.commutator(m).is_zero
    assert component(r.X, -1) == r.X
    assert component(r.Y, 1) == r.Y


def test_gl2_small_cases():
    r = gl2_rep(1)
    assert r.X == Matrix([[0, 1], [0, 0]])
    r = gl2_rep(2)
    assert r.Y[1, 0] == 2 and r.Y[2, 1] == 1
    assert r.degree(0) == -3


def test_ad_split_summands():
    r = gl2_rep(4)
    for k in range(1, 4):
        c, b = ad_split(r, k, r.y_power(k))
        assert c == 1 and b.is_zero
    e = Matrix([[1 if (i, j) == (3, 1) else 0 for j in range(5)] for i in range(5)])
    c, b = ad_split(r, 1, r.X.commutator(e))
    assert c == 0
    assert r.X.commutator(b) == r.X.commutator(e)


def test_ad_split_n2_elementary():
    r = gl2_rep(2)
    a = Matrix([[0, 0, 0], [1, 0, 0], [0, 0, 0]])
    c, b = ad_split(r, 1, a)
    assert r.Y.scale(c) + r.X.commutator(b) == a


@given(st.integers(2, 6), st.data())
@settings(max_examples=40, deadline=None)
def test_ad_split_reconstruction(n, data):
    r = gl2_rep(n)
    k = data.draw(st.integers(1, n))
    vals = data.draw(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=7), min_size=n + 1 - k, max_size=n + 1 - k))
    a = Matrix([[vals[j] if i - j == k else 0 for j in range(n + 1)] for i in range(n + 1)])
    c, b = ad_split(r, k, a)
    assert r.y_power(k).scale(c) + r.X.commutator(b) == a
    assert component(b, k + 1) == b


def test_ad_split_rejects_mixed_degrees():
    r = gl2_rep(3)
    with pytest.raises(PreconditionError):
        ad_split(r, 1, r.Y + r.H)


def test_companion_connection():
    eq = LinearOde((x, 0))
    assert companion_connection(eq) == Matrix([[0, -1], [x, 0]])
    triv = companion_connection(LinearOde((0, 0, 0)))
    assert triv == Matrix([[0, -1, 0], [0, 0, -1], [0, 0, 0]])
    uni = companion_connection(LinearOde.universal(2))
    assert [uni[2, j] for j in range(3)] == [Expr.var(f"p{j}_0") for j in range(3)]


@pytest.mark.parametrize("n", range(2, 7))
def test_reduction_reassembly_and_weights(n):
    red = seashi_reduce(n)
    assert red.verify()
    assert red.alpha.is_zero
    assert sorted(red.thetabar) == list(range(3, n + 2))
    for k, th in red.thetabar.items():
        assert th.is_isobaric(k)
        assert not th.is_zero


def test_reduction_of_trivial_equation():
    triv = LinearOde((0, 0, 0, 0))
    red = seashi_reduce(3)
    for th in red.thetabar.values():
        assert specialize_linear(th, triv).is_zero
    for part in (red.beta, red.gamma):
        assert specialize_linear(part, triv).is_zero


def test_reduction_needs_order_three():
    with pytest.raises(PreconditionError):
        seashi_reduce(1)


def test_lf_spot_values():
    q0, q1 = Expr.var("q0"), Expr.var("q1")
    assert lf_invariants([q0]) == {3: 12 * q0}
    got = lf_invariants([x * q0, x * q1])
    assert got[3] == 12 * x * q1
    assert got[4] == 120 * x * q0 - 60 * q1
    assert all(v.is_zero for v in lf_invariants([ZERO, ZERO, ZERO]).values())


def test_lf_coefficient_exact():
    assert lf_coefficient(2, 3, 1) == 12
    assert lf_coefficient(3, 4, 2) == -60
    assert lf_coefficient(12, 13, 6).denominator == 1


@pytest.mark.parametrize("n, k", [(n, k) for n in range(2, 6) for k in range(3, n + 2)])
def test_proportionality_on_lf_inputs(n, k):
    c = proportionality_constant(n, k)
    if k >= 6:
        assert c is None
        return
    assert c is not None and c != 0
    rng = random.Random(100 * n + k)
    for _ in range(3):
        q = [ZERO] * (n - 1)
        for i in range(n - k + 2):
            q[i] = sum((Fraction(rng.randint(-5, 5), rng.randint(1, 4)) * x**e for e in range(3)), ZERO)
        got = linear_invariants(LinearOde.laguerre_forsyth(q))[k]
        assert got == lf_invariants(q)[k] * c


def test_transform_identity_and_constant_mu():
    eq = LinearOde((x**2, x + 1, 3))
    assert transform_linear(eq, x, Expr.const(1)).coeffs == eq.coeffs
    assert transform_linear(eq, x, Expr.const(7)).coeffs == eq.coeffs


def test_transform_of_trivial_equation_stays_trivial():
    triv = LinearOde((0, 0, 0, 0))
    new = transform_linear(triv, x + x**3 / 3, 1 + x**2)
    assert not all(c.is_zero for c in new.coeffs)
    assert all(v.is_zero for v in linear_invariants(new).values())


def test_transform_rejects_degenerate_maps():
    eq = LinearOde((x, 0, 0))
    with pytest.raises(PreconditionError):
        transform_linear(eq, Expr.const(2), Expr.const(1))
    with pytest.raises(PreconditionError):
        transform_linear(eq, x, ZERO)


coefficient_polys = st.lists(st.integers(-3, 3), min_size=3, max_size=3).map(
    lambda cs: sum((c * x**e for e, c in enumerate(cs)), ZERO)
)


@given(st.integers(2, 4), st.data())
@settings(max_examples=20, deadline=None)
def test_relative_invariance_exact(n, data):
    coeffs = tuple(data.draw(coefficient_polys) for _ in range(n + 1))
    eq = LinearOde(coeffs)
    b = data.draw(st.integers(1, 3))
    lam = data.draw(st.sampled_from([b * x + 1, x + x**3, (x + 2) / (x + 3)]))
    new = transform_linear(eq, lam, Expr.const(1))
    before = linear_invariants(eq)
    after = linear_invariants(new)
    l1 = lam.diff("x")
    for k in before:
        assert after[k] * l1**k == before[k]


def test_universal_linear_specialization_is_identity():
    n = 3
    uni = LinearOde.universal(n)
    th = seashi_reduce(n).thetabar[4]
    assert specialize_linear(th, uni) == th.expr


def test_invariants_accept_derivative_callback():
    q = [Expr.var("p0_0"), Expr.var("p1_0")]
    got = lf_invariants(q, delta_expr)
    assert got[4] == 120 * Expr.var("p0_0") - 60 * Expr.var("p1_1")
    assert isinstance(DiffPoly(got[4], 3), DiffPoly)
