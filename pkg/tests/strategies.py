from fractions import Fraction

from hypothesis import strategies as st

from wilczynski.expr import Expr

NAMES = ("x", "y0", "y1", "y2", "a")

small_ints = st.integers(min_value=-4, max_value=4)
rationals = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 6))


@st.composite
def monomials(draw, names=NAMES, max_degree=2):
    e = Expr.const(draw(rationals))
    for name in draw(st.lists(st.sampled_from(names), max_size=max_degree)):
        e = e * Expr.var(name)
    return e


@st.composite
def polynomials(draw, names=NAMES, max_terms=4):
    acc = Expr.const(0)
    for m in draw(st.lists(monomials(names), min_size=1, max_size=max_terms)):
        acc = acc + m
    return acc


@st.composite
def nonzero_polynomials(draw, names=NAMES):
    p = draw(polynomials(names))
    return p if not p.is_zero else Expr.const(draw(st.integers(1, 5)))


@st.composite
def rational_functions(draw, names=NAMES):
    return draw(polynomials(names)) / draw(nonzero_polynomials(names))


points = st.fixed_dictionaries({n: rationals for n in NAMES})
