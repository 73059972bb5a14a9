import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kantorovich.errors import DomainError, ParseError, RejectedInputError
from kantorovich.funcdsl import format_expression, parse_expression, parse_piecewise, signal
from kantorovich.funcdsl.parser import BinOp, Call, FUNCTIONS, MAX_DEPTH, Neg, Num, Var
from kantorovich.funcdsl.piecewise import parse_interval

E = math.e

HAND_CHECKED = {
    "f1": [(-3.0, 3 * E ** -3), (-1.0001, 3 * E ** -1.0001), (-1.0, -1.0), (-0.5, -1.0),
           (0.0, 2.0), (0.5, 2.0), (1.0, 1.0), (1.5, 1.5), (2.0, -2 * E ** -2),
           (5.0, -2 * E ** -5)],
    "f2": [(-10.0, 3 * E ** -10), (-2.0, 3 * E ** -2), (-1.0, -1.0), (-0.3, -1.0), (0.0, 2.0),
           (0.5, 2.0), (1.0, 2.0), (1.99, 2.0), (2.0, -2 * E ** -2), (3.0, -2 * E ** -3)],
    "f3": [(0.001, 0.002), (0.1, 0.2), (1.0, 2.0), (1.999, 3.998), (2.0, 1.0), (3.0, 1.0),
           (3.99, 1.0), (4.0, -25 / 64), (5.0, -0.2), (10.0, -0.025)],
}


@pytest.mark.parametrize("name", sorted(HAND_CHECKED))
def test_signal_presets_at_hand_checked_points(name):
    f = signal(name)
    for x, expected in HAND_CHECKED[name]:
        assert f(x) == pytest.approx(expected, rel=1e-14, abs=1e-15), (name, x)


def test_signal_preset_shapes():
    assert not signal("f1").is_continuous()
    assert signal("hat").is_continuous()
    np.testing.assert_array_equal(signal("f1").breakpoints(), [-1, 0, 1, 2])
    np.testing.assert_array_equal(signal("f3").breakpoints(), [2, 4])
    with pytest.raises(DomainError):
        signal("f3")(0.0)
    with pytest.raises(RejectedInputError):
        signal("f9")


@pytest.mark.parametrize("text,x,expected", [
    ("3*exp(x)", 0.0, 3.0),
    ("-x^2", 3.0, -9.0),
    ("2^3^2", 0.0, 512.0),
    ("1-2-3", 0.0, -4.0),
    ("8/4/2", 0.0, 1.0),
    ("-25/x^3", 4.0, -25 / 64),
    ("sinc(x)", 0.5, 2 / math.pi),
    ("abs(x)*ln(e)", -2.5, 2.5),
    ("cos(pi*x)", 1.0, -1.0),
    (".5e1 + 1.", 0.0, 6.0),
    ("(-x)^2", 3.0, 9.0),
    ("2^-1", 0.0, 0.5),
])
def test_expressions(text, x, expected):
    assert parse_expression(text)(x) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text", ["", "   ", "x+", "(x", "x)", "foo(x)", "exp x", "3 $ 4",
                                  "x x", "1e999", "*2", "sin()"])
def test_parse_errors(text):
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert 0 <= info.value.offset <= len(text)


def test_deep_nesting_is_rejected():
    with pytest.raises(ParseError):
        parse_expression("(" * (MAX_DEPTH + 5) + "x" + ")" * (MAX_DEPTH + 5))
    with pytest.raises(ParseError):
        parse_expression("-" * (MAX_DEPTH + 5) + "x")


def test_domain_errors():
    with pytest.raises(DomainError):
        parse_expression("ln(x)")(0.0)
    with pytest.raises(DomainError):
        parse_expression("1/x")(np.array([1.0, 0.0]))


def test_vectorized_evaluation():
    f = parse_expression("x^2 + 1")
    np.testing.assert_array_equal(f(np.array([0.0, 1.0, 2.0])), [1.0, 2.0, 5.0])
    assert isinstance(parse_expression("2")(0.0), float)
    assert parse_expression("2")(np.zeros(3)).shape == (3,)


@pytest.mark.parametrize("text,interval", [
    ("", (-math.inf, math.inf)),
    ("x<1.5", (-math.inf, 1.5)),
    ("x>=-2", (-2.0, math.inf)),
    ("-1 <= x < 2e0", (-1.0, 2.0)),
])
def test_intervals(text, interval):
    assert parse_interval(text) == interval


@pytest.mark.parametrize("spec", [
    [("x<0", "1"), ("1<=x<2", "0"), ("x>=2", "1")],   # gap
    [("x<1", "1"), ("0<=x<2", "0"), ("x>=2", "1")],    # overlap
    [("x<0", "1"), ("0<=x<1", "2")],                    # right end uncovered
    [("0<=x<1", "2"), ("x>=1", "0")],                   # left end uncovered on R
])
def test_piecewise_coverage_errors(spec):
    with pytest.raises(RejectedInputError):
        parse_piecewise(spec)


def test_piecewise_syntax_errors():
    with pytest.raises(ParseError):
        parse_piecewise([("x<=1", "1"), ("x>1", "0")])
    with pytest.raises(RejectedInputError):
        parse_piecewise([("2<=x<1", "1")])


def test_piecewise_round_trip():
    f = signal("f1")
    g = parse_piecewise(f.to_spec()["pieces"])
    x = np.linspace(-4, 4, 161)
    np.testing.assert_array_equal(f(x), g(x))


def test_positive_half_line_domain():
    f = parse_piecewise([("", "ln(x)")], domain="R+")
    assert f(E) == pytest.approx(1.0)
    assert f.measure == "log"


# -- generated expression trees -------------------------------------------------

leaves = st.one_of(st.just(Var()),
                   st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num))


def extend(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        st.builds(Call, st.sampled_from(sorted(FUNCTIONS)), children),
    )


trees = st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_format_parse_round_trip(tree):
    assert parse_expression(format_expression(tree)) == tree


@settings(max_examples=200, deadline=None)
@given(trees, st.floats(-3, 3))
def test_round_trip_preserves_values(tree, x):
    again = parse_expression(format_expression(tree))
    try:
        a = tree(x)
    except DomainError:
        with pytest.raises(DomainError):
            again(x)
        return
    assert again(x) == a


ALPHABET = list("x0123456789.e+-*/^() ") + ["exp", "ln", "sin", "cos", "abs", "sinc", "pi", "E",
                                             "@", "xx", "1e308"]


def test_fuzz_parser_never_crashes():
    rng = np.random.default_rng(7)
    parsed = 0
    for _ in range(10_000):
        tokens = rng.choice(ALPHABET, size=rng.integers(0, 16))
        text = "".join(tokens)
        try:
            node = parse_expression(text)
        except ParseError:
            continue
        parsed += 1
        try:
            node(np.array([-1.5, 0.0, 0.7, 3.0]))
        except DomainError:
            pass
    assert parsed > 100
