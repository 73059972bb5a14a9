import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kantorovich.errors import ModularOverflowError, RejectedInputError
from kantorovich.funcdsl import parse_piecewise, signal
from kantorovich.orlicz import (PhiFunction, delta2_audit, difference, error_metrics, lp_norm,
                                luxemburg_norm, modular)


def step_function(cuts, heights):
    edges = sorted(cuts)
    pieces = [(f"x<{edges[0]!r}", "0")]
    for a, b, h in zip(edges, edges[1:], heights):
        pieces.append((f"{a!r}<=x<{b!r}", repr(float(h))))
    pieces.append((f"x>={edges[-1]!r}", "0"))
    return parse_piecewise(pieces)


steps = st.integers(2, 6).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-4, 4), min_size=n, max_size=n, unique=True).filter(
        lambda c: min(np.diff(sorted(c))) > 1e-3),
    st.lists(st.floats(-5, 5).filter(lambda h: abs(h) > 1e-3), min_size=n - 1, max_size=n - 1)))


@settings(max_examples=50, deadline=None)
@given(steps, st.sampled_from([1.0, 2.0, 3.5]))
def test_standard_luxemburg_equals_lp_norm(data, p):
    cuts, heights = data
    g = step_function(cuts, heights)
    edges = np.sort(cuts)
    exact = sum(abs(h) ** p * (b - a) for a, b, h in zip(edges, edges[1:], heights)) ** (1 / p)
    lux = luxemburg_norm(PhiFunction.power(p), g, (-5, 5))
    assert abs(lux - exact) <= 1e-7 * max(1.0, exact)


def test_paper_convention_closed_form():
    g = parse_piecewise([("x<0", "0"), ("0<=x<1", "2"), ("x>=1", "0")])
    # int (2/lam)^2 over [0, 1] <= lam  gives  lam^3 = 4
    lux = luxemburg_norm(PhiFunction.power(2), g, (-1, 2), convention="paper")
    assert abs(lux - 4 ** (1 / 3)) < 1e-8
    assert abs(luxemburg_norm(PhiFunction.power(2), g, (-1, 2)) - 2.0) < 1e-8


def test_luxemburg_of_zero():
    zero = parse_piecewise([("", "0")])
    assert luxemburg_norm(PhiFunction.power(2), zero, (-1, 1)) == 0.0


def test_unknown_convention():
    with pytest.raises(RejectedInputError):
        luxemburg_norm(PhiFunction.power(2), signal("hat"), (-2, 2), convention="other")


def test_delta2_verdicts():
    assert delta2_audit(PhiFunction.power(2)).verdict == "satisfied on grid"
    assert delta2_audit(PhiFunction.interpolation(1, 1)).verdict == "satisfied on grid"
    expo = delta2_audit(PhiFunction.exponential(1))
    assert expo.verdict == "fails on grid"
    # (e^40 - 1)/(e^20 - 1) = e^20 + 1
    assert expo.ratio_at_max == pytest.approx(math.exp(20) + 1, rel=1e-12)
    assert expo.ratio_at_max > 1e6


def test_power_delta2_ratio_is_constant():
    r = delta2_audit(PhiFunction.power(3.0))
    assert r.sup_ratio == pytest.approx(8.0) and r.median_ratio == pytest.approx(8.0)


@pytest.mark.parametrize("phi", [PhiFunction.power(1), PhiFunction.power(2.5),
                                 PhiFunction.interpolation(1, 1),
                                 PhiFunction.interpolation(2, 0.5),
                                 PhiFunction.exponential(1)])
def test_builtin_phi_axioms(phi):
    res = phi.check_axioms()
    assert all(res.values()), res
    assert phi(0.0) == 0.0


@pytest.mark.parametrize("make", [lambda: PhiFunction.power(0.5),
                                  lambda: PhiFunction.interpolation(0.5, 1),
                                  lambda: PhiFunction.interpolation(1, 0),
                                  lambda: PhiFunction.exponential(0)])
def test_invalid_phi(make):
    with pytest.raises(RejectedInputError):
        make()


def test_nonconvex_custom_phi_is_flagged():
    phi = PhiFunction.custom(np.sqrt, convex=False, name="sqrt")
    assert not phi.check_axioms()["midpoint_convex"]


def test_exponential_modular_closed_form():
    ind = parse_piecewise([("x<0", "0"), ("0<=x<1", "1"), ("x>=1", "0")])
    val = modular(PhiFunction.exponential(1), ind, (-1, 2), lam=0.1)
    assert val == pytest.approx(math.expm1(0.1), rel=1e-12)


def test_modular_overflow():
    ind = parse_piecewise([("x<0", "0"), ("0<=x<1", "1"), ("x>=1", "0")])
    with pytest.raises(ModularOverflowError):
        modular(PhiFunction.exponential(1), ind, (-1, 2), lam=1000.0)


def test_log_measure_modular():
    g = parse_piecewise([("", "1")], domain="R+")
    # int_1^e 1 dt/t = 1
    assert modular(PhiFunction.power(2), g, (1, math.e), measure="log") == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(steps, st.floats(0.1, 2.0), st.floats(1.01, 3.0))
def test_modular_is_monotone_in_lambda(data, lam, factor):
    g = step_function(*data)
    phi = PhiFunction.interpolation(1, 1)
    assert modular(phi, g, (-5, 5), lam=lam) <= modular(phi, g, (-5, 5), lam=lam * factor)


@settings(max_examples=40, deadline=None)
@given(steps, st.floats(0.05, 1.0))
def test_modular_convexity_scaling(data, a):
    # phi convex with phi(0) = 0 gives I(a g) <= a I(g) for 0 < a <= 1
    g = step_function(*data)
    phi = PhiFunction.power(2)
    assert modular(phi, g, (-5, 5), lam=a) <= a * modular(phi, g, (-5, 5)) * (1 + 1e-12)


def test_error_metrics_on_indicator():
    ind = parse_piecewise([("x<0", "0"), ("0<=x<1", "1"), ("x>=1", "0")])
    zero = parse_piecewise([("", "0")])
    grid = np.linspace(-1, 2, 31)
    t = error_metrics(ind, zero, grid, p_list=[1, 2], phi_list=[PhiFunction.power(2)],
                      lam_list=[1.0])
    assert t.sup == 1.0
    assert t.lp[1.0] == pytest.approx(1.0) and t.lp[2.0] == pytest.approx(1.0)
    assert t.modular[("u^2", 1.0)] == pytest.approx(1.0)
    assert set(t.flat()) == {"sup", "L1", "L2", "I[u^2](lam=1)"}


def test_difference_merges_breakpoints():
    d = difference(signal("f1"), signal("hat"))
    np.testing.assert_array_equal(d.breakpoints_in(-5, 5), [-1, 0, 1, 2])
    assert d(0.5) == pytest.approx(2 - 0.5)


def test_lp_norm_of_hat():
    # int (1 - |x|)^2 over [-1, 1] = 2/3
    assert lp_norm(signal("hat"), 2, (-3, 3)) == pytest.approx(math.sqrt(2 / 3), rel=1e-12)
