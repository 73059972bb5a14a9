import math

import numpy as np
import pytest

from kantorovich.errors import AuditFailure, RejectedInputError
from kantorovich.group_model import SampleSequence
from kantorovich.kernels import (KernelFamily, audit_chi2, audit_chi4, audit_chi5, builtin_kernel,
                                 kernel_mass, run_audits)
from kantorovich.kernels.audits import chi6_quantity, require
from kantorovich.operators import OperatorSpec, Variant

W = [5.0, 10.0, 15.0]


def spec_for(variant, kernel="M", scaling="dilate", samples="uniform", amplitude=1.0, dim=1):
    fam = KernelFamily(builtin_kernel(kernel), scaling, tensor_dim=dim, amplitude=amplitude)
    return OperatorSpec(Variant.parse(variant), fam, SampleSequence.preset(samples), w=W[0],
                        dim=dim)


def test_conv_scaled_with_combo_kernel_passes():
    rep = run_audits(spec_for("2"), W)
    assert rep.passed, rep.failures()
    # the mass of |M| is 7/6 and the convolution integral does not depend on z
    assert rep.M_hat == pytest.approx(7 / 6, abs=1e-9)
    assert rep.C_hat == pytest.approx(7 / 6, abs=1e-9)
    assert set(rep.entries) == {"chi2", "chi3", "chi4", "chi5", "chi6"}


def test_sampling_constants():
    rep = run_audits(spec_for("1"), W)
    assert rep.passed
    # sup_u sum_k |M(u - k)| is attained at u = 1/2: 2 |M(1/2)| + 2 |M(3/2)| = 1.25
    m = builtin_kernel("M")
    assert rep.M_hat == pytest.approx(2 * abs(m(0.5)) + 2 * abs(m(1.5)), abs=1e-9)
    assert rep.C_hat == pytest.approx(7 / 6, abs=1e-9)


def test_symmetric_sampling_overlap_factor():
    rep = run_audits(spec_for("1,1"), W)
    assert rep.passed
    # each point lies in at most ceil(2/delta) + 1 = 3 cells of length 2/w
    assert rep.C_hat == pytest.approx(7 / 6 * 3 / 2, abs=1e-9)


def test_unnormalized_kernel_fails_partition_of_unity():
    spec = spec_for("1", kernel="M3", amplitude=2.0)
    e = audit_chi2(None, spec, 5.0)
    assert not e.passed
    assert e.value == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(AuditFailure, match="chi2"):
        require(run_audits(spec, [5.0, 10.0]))


def test_perturbed_nodes_break_partition_of_unity():
    e = audit_chi2(None, spec_for("1", samples="perturbed"), 5.0)
    assert not e.passed and e.value > 0.1


def test_mellin_audits():
    spec = spec_for("4", kernel="mellin", scaling="mellin")
    rep = run_audits(spec, [5.0, 20.0, 30.0])
    assert rep.passed, rep.failures()
    assert rep.M_hat == pytest.approx(1.0, abs=1e-9)
    tails = rep.entries["chi4"].values
    # mass of w u^w du/u on u < 1/(1 + gamma) is (1 + gamma)^-w
    np.testing.assert_allclose(tails, [1.5 ** -5, 1.5 ** -20, 1.5 ** -30], rtol=1e-9)


@pytest.mark.slow
def test_fejer_sampling_passes_with_truncation():
    rep = run_audits(spec_for("1", kernel="fejer"), W)
    assert rep.passed, rep.failures()
    assert 0 < rep.entries["chi2"].extra["tail_bound"] <= 1e-6


def test_kernel_mass_backends_agree(backend):
    spec = spec_for("1")
    z = np.linspace(-1, 1, 33)
    ref, _ = kernel_mass(spec, z, absolute=True, backend="numpy")
    got, _ = kernel_mass(spec, z, absolute=True, backend=backend)
    np.testing.assert_allclose(got, ref, atol=1e-14)


def test_chi4_vanishes_for_compact_kernel():
    e = audit_chi4(None, spec_for("2"), 0.5, W)
    # the support of M(w u) is |u| <= 2/w < 0.5 for w >= 5
    assert e.passed and max(e.values) == 0.0


def test_chi5_radius_for_compact_kernel():
    e = audit_chi5(None, spec_for("2"), 1.0, 1e-3, W)
    assert e.passed
    assert all(v > 1.0 for v in e.values)


def test_chi6_forms():
    s = spec_for("2").with_w(4.0)
    assert chi6_quantity(s, 0.25) == 1.0
    assert chi6_quantity(spec_for("3").with_w(4.0), 0.25) == 0.25
    with pytest.raises(RejectedInputError):
        chi6_quantity(spec_for("1").classical(), 1.0)


def test_classical_variant_skips_chi6():
    rep = run_audits(spec_for("1").classical(), [5.0, 10.0])
    assert "chi6" not in rep.entries and math.isnan(rep.C_hat)


def test_audits_are_deterministic():
    a = run_audits(spec_for("1,1"), W).rows()
    b = run_audits(spec_for("1,1"), W).rows()
    assert a == b


def test_multidim_audit():
    rep = run_audits(spec_for("5", dim=2), [5.0, 10.0])
    assert rep.passed
    assert rep.M_hat == pytest.approx(1.25 ** 2, abs=1e-9)


@pytest.mark.parametrize("bad", [[], [0.0], [-1.0, 2.0], [math.inf]])
def test_bad_w_lists(bad):
    with pytest.raises(RejectedInputError):
        run_audits(spec_for("2"), bad)
