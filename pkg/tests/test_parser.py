import pytest

from wilczynski.equations import parse_equation, parse_system
from wilczynski.errors import ParseError
from wilczynski.expr import Expr
from wilczynski.parser import ParseContext, parse


def test_derivative_notations_agree():
    assert parse("y''' + y^(3) - 2*y3") == Expr.const(0)
    assert parse("y") == Expr.var("y0")


def test_precedence_and_unary_minus():
    assert parse("-2^2") == Expr.const(-4)
    assert parse("2*3 + 4/2 - (1 - 3)") == Expr.const(10)
    assert parse("(1/2)^3") == Expr.const(1) / 8


def test_parameters():
    e = parse("a*y'", ParseContext(params=frozenset({"a"})))
    assert e.variables == {"a", "y1"}
    with pytest.raises(ParseError, match="unknown variable 'b'"):
        parse("b*y'", ParseContext(params=frozenset({"a"})))


@pytest.mark.parametrize(
    "text, column",
    [
        ("y''' = y'^", 11),
        ("y''' = 1.5*y", 8),
        ("y''' = sin(y)", 8),
        ("y''' = y^(-1)", 11),
        ("y''' = (y'", 11),
    ],
)
def test_errors_carry_locations(text, column):
    with pytest.raises(ParseError) as info:
        parse_equation(text)
    assert info.value.line == 1
    assert info.value.column == column


def test_equation_shape():
    eq = parse_equation("y^(5) = y''*y'''")
    assert eq.order == 5
    with pytest.raises(ParseError):
        parse_equation("y''' = y'''")
    with pytest.raises(ParseError):
        parse_equation("y''' + 1 = 0")
    with pytest.raises(ParseError):
        parse_equation("y''' = y'' = 1")


def test_system_parsing():
    s = parse_system("y1'' = y2*y1'\ny2'' = x")
    assert s.m == 2
    assert s.rhs[1] == Expr.var("x")
    with pytest.raises(ParseError) as info:
        parse_system("y1'' = 0\ny1'' = 1")
    assert info.value.line == 2
    with pytest.raises(ParseError, match="missing equation for y1"):
        parse_system("y2'' = 0")
