import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import BSpline
from scipy.special import sici

from kantorovich.errors import DomainError, RejectedInputError
from kantorovich.kernels import (KernelFamily, builtin_kernel, bspline_kernel, custom_kernel,
                                 fejer_kernel, kernel_l1_norm, mellin_kernel, sinc_kernel)
from kantorovich.kernels.evaluators import (base_scalar, bspline_eval, bspline_scalar,
                                            mellin_kernel_eval)


def scipy_bspline(n):
    knots = np.arange(n + 1) - n / 2
    return BSpline.basis_element(knots, extrapolate=False)


@pytest.mark.parametrize("n", range(1, 11))
def test_bspline_matches_scipy(n):
    x = np.linspace(-n / 2 - 0.5, n / 2 + 0.5, 1001)
    if n == 1:
        # the order-1 spline jumps at its knots, where the two conventions differ
        x = x[np.abs(np.abs(x) - 0.5) > 1e-12]
    ref = np.nan_to_num(scipy_bspline(n)(x))
    np.testing.assert_allclose(bspline_eval(n, x), ref, atol=1e-13)


def test_bspline_center_values():
    assert bspline_eval(3, 0.0) == pytest.approx(0.75, abs=1e-12)
    assert bspline_eval(4, 0.0) == pytest.approx(2 / 3, abs=1e-12)
    assert builtin_kernel("M")(0.0) == pytest.approx(1.0, abs=1e-12)


def test_bspline_is_zero_outside_support():
    for n in (1, 2, 5, 10):
        x = np.array([n / 2, -n / 2, n / 2 + 1e-9, 100.0])
        assert np.all(bspline_eval(n, x) == 0.0)


@pytest.mark.parametrize("n", [0, 11, 2.5, True])
def test_bspline_order_rejected(n):
    with pytest.raises(RejectedInputError):
        bspline_eval(n, 0.0)


def test_scalar_twins_agree():
    x = np.linspace(-6, 6, 301)
    for n in (1, 3, 4, 7):
        np.testing.assert_allclose([bspline_scalar(n, v) for v in x], bspline_eval(n, x),
                                   atol=1e-14)
    np.testing.assert_allclose([base_scalar(1, 0.0, v) for v in x], builtin_kernel("M")(x),
                               atol=1e-14)
    np.testing.assert_allclose([base_scalar(2, 0.0, v) for v in x], fejer_kernel()(x),
                               atol=1e-15)
    np.testing.assert_allclose([base_scalar(3, 0.0, v) for v in x], sinc_kernel()(x),
                               atol=1e-15)


def sympy_l1_of_combo():
    x = sp.symbols("x", real=True)

    def m(n):
        knots = tuple(sp.Rational(-n, 2) + j for j in range(n + 1))
        return sp.bspline_basis(n - 1, knots, 0, x)

    k = sp.piecewise_fold(4 * m(3) - 3 * m(4))
    total = 0
    for j in range(-4, 4):
        a, b = sp.Rational(j, 2), sp.Rational(j + 1, 2)
        poly = [arg.expr for arg in k.args if arg.cond.subs(x, (a + b) / 2) == True][0]  # noqa: E712
        roots = [r for r in sp.real_roots(sp.Poly(poly, x)) if a < r < b]
        pts = [a] + sorted(roots) + [b]
        total += sum(sp.Abs(sp.integrate(poly, (x, c, d))) for c, d in zip(pts, pts[1:]))
    return float(total)


def test_l1_norm_of_combo_kernel_against_sympy():
    oracle = sympy_l1_of_combo()
    assert oracle == pytest.approx(7 / 6, abs=1e-15)
    assert abs(kernel_l1_norm(builtin_kernel("M")) - oracle) < 1e-10


def test_integral_of_combo_kernel():
    k = builtin_kernel("M")
    fam = KernelFamily(k, "none")
    from kantorovich.quadrature import quad
    assert abs(quad(k, -2, 2, breakpoints=k.knots) - 1) < 1e-12
    assert kernel_l1_norm(fam.at(1.0)) == pytest.approx(7 / 6, abs=1e-10)


def fejer_tail_exact(R):
    # two-sided mass of 0.5*sinc(x/2)^2 beyond |x| = R, via Si
    t = math.pi * R / 2
    return 1.0 - (2 / math.pi) * (sici(2 * t)[0] - math.sin(t) ** 2 / t)


@pytest.mark.parametrize("R", [3.0, 10.0, 57.5, 400.0])
def test_fejer_envelope_bounds_tail(R):
    assert fejer_kernel().tail_bound(R) >= fejer_tail_exact(R)


@pytest.mark.parametrize("tol", [1e-4, 1e-6, 1e-8])
def test_fejer_tail_rule_estimate(tol):
    S, est, err = fejer_kernel().truncation(tol)
    assert err <= tol
    assert abs(2 * est - fejer_tail_exact(S)) <= err


def test_fejer_l1_norm_is_one():
    assert abs(kernel_l1_norm(fejer_kernel()) - 1.0) < 1e-7


def test_sinc_has_no_integrable_tail():
    with pytest.raises(RejectedInputError):
        kernel_l1_norm(sinc_kernel())


@pytest.mark.parametrize("w", [5.0, 20.0, 30.0])
def test_mellin_kernel_mass(w):
    chi = KernelFamily(mellin_kernel(), "mellin").at(w)
    assert abs(kernel_l1_norm(chi, tol=1e-12) - 1.0) < 1e-10


def test_mellin_kernel_domain():
    with pytest.raises(DomainError):
        mellin_kernel_eval(5.0, [0.5, 0.0])
    assert mellin_kernel_eval(2.0, 0.5) == pytest.approx(0.5)
    assert mellin_kernel_eval(2.0, 1.5) == 0.0


@pytest.mark.parametrize("scaling,w,expected", [
    ("dilate", 4.0, 7 / 24), ("dilate_weight", 4.0, 7 / 6), ("none", 4.0, 7 / 6)])
def test_scaled_norms(scaling, w, expected):
    chi = KernelFamily(builtin_kernel("M"), scaling).at(w)
    assert kernel_l1_norm(chi) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50, allow_nan=False))
def test_partition_of_unity(u):
    k = np.arange(math.floor(u) - 3, math.ceil(u) + 4)
    for kern in (builtin_kernel("M"), bspline_kernel(3), bspline_kernel(4), bspline_kernel(7)):
        assert abs(np.sum(kern(u - k)) - 1.0) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20, allow_nan=False))
def test_combo_kernel_discrete_moments(u):
    # 4 M3 - 3 M4 reproduces linear polynomials and has vanishing second moment
    k = np.arange(math.floor(u) - 3, math.ceil(u) + 4)
    vals = builtin_kernel("M")(u - k)
    assert abs(np.sum((u - k) * vals)) < 1e-11
    assert abs(np.sum((u - k) ** 2 * vals)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(-30, 30, allow_nan=False))
def test_fejer_partition_of_unity(u):
    # the tail beyond |u - k| > 2000 is below 2/(pi^2 * 2000) per side
    k = np.arange(math.floor(u) - 2000, math.ceil(u) + 2001)
    assert abs(np.sum(fejer_kernel()(u - k)) - 1.0) < 2.1e-4


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.floats(-6, 6, allow_nan=False))
def test_bspline_symmetry_and_nonnegativity(n, x):
    assert bspline_eval(n, x) == bspline_eval(n, -x)
    assert bspline_eval(n, x) >= 0.0


def test_custom_kernel():
    k = custom_kernel("1-abs(x)", support=(-1, 1))
    assert k(0.5) == 0.5 and k(1.5) == 0.0
    with pytest.raises(RejectedInputError):
        custom_kernel("exp(-x^2)")
    g = custom_kernel("exp(-x^2)/pi^0.5", envelope=(0.5, 4.0))
    assert kernel_l1_norm(g, trunc_tol=1e-6) == pytest.approx(1.0, abs=2e-6)


def test_builtin_lookup():
    assert builtin_kernel("M5").support == (-2.5, 2.5)
    assert builtin_kernel("bspline", 2).support == (-1.0, 1.0)
    with pytest.raises(RejectedInputError):
        builtin_kernel("gauss")


def test_family_validation():
    with pytest.raises(RejectedInputError):
        KernelFamily(builtin_kernel("M"), "mellin")
    with pytest.raises(RejectedInputError):
        KernelFamily(mellin_kernel(), "dilate")
    with pytest.raises(RejectedInputError):
        KernelFamily(builtin_kernel("M"), "stretch")
    with pytest.raises(RejectedInputError):
        KernelFamily(builtin_kernel("M")).at(0.0)


def test_tensor_kernel_is_product():
    chi = KernelFamily(bspline_kernel(3), "dilate", tensor_dim=2).at(2.0)
    assert chi.tensor(0.1, -0.2) == pytest.approx(chi(0.1) * chi(-0.2))
