from math import pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadcurv import functional as F
from quadcurv.errors import ArgumentError, BoundaryError, PreconditionError
from quadcurv.models import load_model, make_berger_sphere, make_product_spheres, make_round_sphere


def P(t, s):
    return F.FunctionalParams(t, s)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_round_sphere_value(n):
    t, s = 0.3, -0.2
    m = make_round_sphere(n)
    want = m.volume * (n * (n - 1) ** 2 + t * (n * (n - 1)) ** 2 + s * 2 * n * (n - 1))
    assert F.functional_value(m, P(t, s)).value == pytest.approx(want, rel=1e-13)


def test_flat_torus_zero():
    rep = F.functional_value(load_model("flat-torus-3"), P(1.0, 2.0))
    assert rep.value == 0.0
    assert set(rep.to_json()["components"]) == {"ric2", "R2", "rm2"}


def test_n4_scale_invariance():
    m = load_model("s2xs2-unequal")
    a = F.functional_value(m, P(0.2, 0.1)).value
    b = F.functional_value(m.scaled(3.0), P(0.2, 0.1)).value
    assert b == pytest.approx(a, rel=1e-13)


def test_params_must_be_finite():
    with pytest.raises(ArgumentError):
        P(float("nan"), 0.0)


@settings(max_examples=30, deadline=None)
@given(n=st.sampled_from([3, 4, 5]), t=st.floats(-3, 3), s=st.floats(-3, 3))
def test_space_forms_critical(n, t, s):
    unit, _ = make_round_sphere(n).normalize_unit_volume()
    a = F.el_residual_traceless(unit, P(t, s))
    b = F.el_residual_scalar(unit, P(t, s))
    assert a.relative < 1e-8 and b.relative < 1e-8


@pytest.mark.parametrize("eps", [0.4, 0.6, 1.3])
@pytest.mark.parametrize("s", [-0.1, 0.0, 0.2])
def test_berger_critical_curve(eps, s):
    t = F.berger_critical_t(eps, s)
    c = F.criticality(make_berger_sphere(eps), P(t, s))
    assert c["critical"]
    # off the curve the same metric is not critical
    assert not F.criticality(make_berger_sphere(eps), P(t + 0.5, s))["critical"]
    g = F.restricted_gradient(F.make_family("berger"), P(t, s), [eps])
    assert abs(g[0]) < 1e-7


def test_berger_invariants_match_pack():
    m = make_berger_sphere(0.7)
    I = m.integrals(0)
    b = F.berger_invariants(0.7)
    assert I["norm_Ric2"] == pytest.approx(b["ric2"] * b["volume"], rel=1e-12)
    assert I["norm_Rm2"] == pytest.approx(b["rm2"] * b["volume"], rel=1e-12)


def test_unequal_product_critical_on_line():
    m = make_product_spheres(2, 1.0, 2, 2.0)
    assert F.criticality(m, P(-0.8, 0.3))["critical"]
    assert not F.criticality(m, P(0.0, 0.0))["critical"]


def test_product_value_closed_form():
    # unit volume S2(r1) x S2(r2): 16 pi^2 [(2 + 4s + 4t)(u^2 + u^-2) + 8t], u = r1 / r2
    t, s, u = 0.3, -0.1, 1.7
    unit, _ = make_product_spheres(2, u, 2, 1.0).normalize_unit_volume()
    want = 16 * pi ** 2 * ((2 + 4 * s + 4 * t) * (u ** 2 + u ** -2) + 8 * t)
    assert F.functional_value(unit, P(t, s)).value == pytest.approx(want, rel=1e-12)


def test_scalar_el_needs_unit_volume():
    with pytest.raises(PreconditionError) as ei:
        F.el_residual_scalar(make_round_sphere(3), P(0, 0))
    assert ei.value.gate == "unit_volume"


def test_n4_flag():
    unit, _ = make_round_sphere(4).normalize_unit_volume()
    assert F.el_residual_scalar(unit, P(0, 0)).flags == ["n4-lhs-only"]


def test_identities_on_critical_berger():
    eps, s = 0.6, 0.1
    t = F.berger_critical_t(eps, s)
    m = make_berger_sphere(eps)
    for ident in F.IDENTITIES:
        rep = F.identity_check(m, ident, P(t, s))
        assert rep.verdict == "pass", (ident, rep.relative_gap)


def test_cotton_div_berger_half():
    rep = F.identity_check(load_model("berger-0.5"), "cotton_div")
    assert rep.verdict == "pass" and rep.relative_gap < 1e-10


def test_lemma22_quadrature():
    rep = F.identity_check(load_model("perturbed-torus-3"), "lemma22")
    assert rep.verdict == "pass"


def test_noncritical_is_inapplicable():
    rep = F.identity_check(load_model("berger-0.5"), "lemma21", P(0.0, 0.0))
    assert rep.applicability["critical"] is False
    assert rep.verdict == "inapplicable"


def test_identity_preconditions():
    with pytest.raises(PreconditionError) as ei:
        F.identity_check(make_round_sphere(4), "n3_93", P(0, 0))
    assert ei.value.gate == "dimension"
    with pytest.raises(PreconditionError) as ei:
        F.identity_check(make_round_sphere(3), "combined49", P(0, -1 / 8))
    assert ei.value.gate == "8s+n-2"
    with pytest.raises(PreconditionError) as ei:
        F.identity_check(load_model("s2xs2"), "lcf_1030", P(0, 0))
    assert ei.value.gate == "lcf"
    with pytest.raises(PreconditionError) as ei:
        F.identity_check(make_round_sphere(3), "lemma21")
    assert ei.value.gate == "params"
    with pytest.raises(ArgumentError):
        F.identity_check(make_round_sphere(3), "lemma99")


def test_product_ratio_search():
    rep = F.restricted_critical_search(F.make_family("product-spheres"), P(0, 0))
    assert rep["converged"] and rep["grad_norm"] < 1e-8
    assert rep["x"][0] == pytest.approx(1.0, abs=1e-6)
    assert rep["signature"]["positive"] == 1


def test_berger_search_finds_curve_point():
    t = F.berger_critical_t(0.6, 0.1)
    rep = F.restricted_critical_search(F.make_family("berger"), P(t, 0.1), [0.7])
    assert rep["converged"]
    assert rep["x"][0] == pytest.approx(0.6, abs=1e-5)


def test_conformal_flat_point_stationary():
    fam = F.make_family("conformal-torus", n=3, modes=2, grid=8)
    g = F.restricted_gradient(fam, P(0.1, 0.2), [0.0, 0.0])
    assert np.max(np.abs(g)) < 1e-10


def test_family_boundary():
    fam = F.make_family("berger")
    with pytest.raises(BoundaryError):
        fam.value(np.array([2.5]), P(0, 0))
    with pytest.raises(BoundaryError):
        F.restricted_critical_search(fam, P(0, 0), [-1.0])
    with pytest.raises(ArgumentError):
        F.make_family("lens-space")


def test_sweep_csv():
    text = F.sweep_csv([{"eps": 0.5, "t": F.berger_critical_t(0.5, 0.0)}])
    head, row = text.strip().split("\n")
    assert head == "eps,t"
    assert float(row.split(",")[1]) == F.berger_critical_t(0.5, 0.0)
    assert F.sweep_csv([]) == ""
