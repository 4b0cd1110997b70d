import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from golden import GOLDEN
from quadcurv import functional as F
from quadcurv import hypotheses as H
from quadcurv import tensors as T
from quadcurv.errors import ArgumentError, PreconditionError
from quadcurv.invariants import pack_from_frame
from quadcurv.models import load_model, make_round_sphere


@pytest.mark.parametrize("row", GOLDEN, ids=lambda r: f"n{r[0]}_t{r[1]:.4g}_s{r[2]:.4g}")
def test_golden_table(row):
    n, t, s, systems, flags = row
    v = H.classify(H.ParamPoint(n, t, s)).to_json()
    assert v["systems"] == systems
    assert [f for f in v["flags"] if f != "boundary"] == flags


def test_golden_table_size():
    assert len(GOLDEN) >= 30


def test_boundary_marker():
    assert H.classify(H.ParamPoint(3, 0.3, -0.25)).boundary
    assert not H.classify(H.ParamPoint(3, 0.1, 0.05)).boundary
    # every point on the constraint line is on a boundary
    assert H.classify(H.ParamPoint(4, -0.3, -0.2)).boundary


def test_theorem_grouping():
    v = H.classify(H.ParamPoint(5, -2.0, 0.0)).to_json()
    assert v["theorems"] == {"thm1.1": ["44th-Form-1"], "thm1.5": ["7th-Form-1"], "thm1.7": ["11th-Form-1"]}


def test_bad_points():
    with pytest.raises(ArgumentError):
        H.ParamPoint(2, 0.0, 0.0)
    with pytest.raises(ArgumentError):
        H.ParamPoint(3, float("inf"), 0.0)
    with pytest.raises(ArgumentError):
        H.theorem_id("thm2.1")
    assert H.theorem_id("THM1.5") == "thm1.5"


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 8), t=st.floats(-3, 3), s=st.floats(-3, 3))
def test_piecewise_constant(n, t, s):
    assume(np.min(np.abs(H._boundary_values(n, t, s))) > 1e-9)
    a = H.classify(H.ParamPoint(n, t, s)).to_json()
    b = H.classify(H.ParamPoint(n, t + 1e-13, s - 1e-13)).to_json()
    assert a["systems"] == b["systems"]


@settings(max_examples=100, deadline=None)
@given(n=st.integers(3, 8), t=st.floats(-3, 3), s=st.floats(-3, 3))
def test_grid_matches_pointwise(n, t, s):
    g = H.classify_grid(n, np.array([t]), np.array([s]))
    p = H.classify(H.ParamPoint(n, t, s)).to_json()
    assert [k for k, v in g["systems"].items() if v[0]] == p["systems"]


def test_systems_stated_per_dimension():
    assert "33th-Form-1" not in H.systems(3, 0.0, 0.0)
    assert "9th-Form-1" in H.systems(3, 0.0, 0.0)
    assert "11th-Form-1" not in H.systems(4, 0.0, 0.0)
    assert "thm1.7-n4" in H.systems(4, 0.0, 0.0)
    assert H.theorem_systems(4)["thm1.2"] == []


@settings(max_examples=30, deadline=None)
@given(n=st.integers(4, 6), seed=st.integers(0, 10_000), s=st.floats(-2, 2))
def test_combined_norm_split(n, seed, s):
    # |W + c R0 ^ g|^2 = |W|^2 + 4(n-2) c^2 |R0|^2 for Weyl-like W
    assume(abs(8 * s + n - 2) > 1e-3)
    rng = np.random.default_rng(seed)
    rm = T.random_curvature_batch(rng, 5, n)
    pack = pack_from_frame(rm)
    rep = H.pointwise_margin("thm1.1", pack, F.FunctionalParams(0.1, s))
    assert rep.combined_rel_diff < 1e-10


def test_einstein_margin_zero_lhs():
    pack = make_round_sphere(4).pack_at(np.zeros((1, 4)))
    rep = H.pointwise_margin("thm1.2", pack, F.FunctionalParams(0.0, 0.0))
    assert rep.lhs[0] == 0.0 and rep.rhs[0] == 0.0
    assert not rep.holds


def test_margin_preconditions():
    pack = make_round_sphere(4).pack_at(np.zeros((1, 4)))
    with pytest.raises(PreconditionError):
        H.pointwise_margin("thm1.1", pack, F.FunctionalParams(0.0, -0.25))
    with pytest.raises(PreconditionError):
        H.pointwise_margin("thm1.3", pack, F.FunctionalParams(0.0, 0.0))
    with pytest.raises(PreconditionError):
        H.pointwise_margin("thm1.9", pack, F.FunctionalParams(0.0, 0.0))
    with pytest.raises(ArgumentError):
        H.pointwise_margin("thm1.3", pack, F.FunctionalParams(-0.5, 0.0), line_form="guess")


def test_perturbed_torus_margins_locked():
    m, _ = load_model("perturbed-torus-4").normalize_unit_volume()
    pack = m.pack_at(m.sample_points(3, seed=0), depth=0)
    rep = H.pointwise_margin("thm1.1", pack, F.FunctionalParams(-2.0, 0.0))
    assert rep.margin.shape == (3,)
    # round-tripped against a separate evaluation of the split norm
    n, s = 4, 0.0
    nr0 = np.sqrt(pack.norms["norm_Ric0_2"])
    lhs = np.sqrt(pack.norms["norm_W2"]) * nr0
    assert np.allclose(rep.lhs, lhs, rtol=1e-12)
    d = 8 * s + n - 2
    B = 3 * n - 4 + 2 * n * (n - 1) * -2.0 + 8 * s
    rhs = -np.sqrt(2 * (n - 2) / (n - 1)) * B / (n * d) * pack.R * nr0
    assert np.allclose(rep.rhs, rhs, rtol=1e-12)


def test_round_sphere_hypotheses_fail():
    rep = H.manifold_hypothesis_check(make_round_sphere(5), "thm1.1", F.FunctionalParams(-2.0, 0.0))
    assert rep.gates["param_system"] and rep.gates["critical"]
    assert rep.verdict == "hypotheses-fail"


def test_berger_thm18_inapplicable():
    rep = H.manifold_hypothesis_check(load_model("berger-0.8"), "thm1.8", F.FunctionalParams(0.0, 0.0))
    assert rep.verdict == "inapplicable"
    assert "cotton_div_zero" in rep.reasons or "critical" in rep.reasons


def test_conformal_torus_positive_R_witness():
    rep = H.manifold_hypothesis_check(load_model("conformal-torus-3"), "thm1.8", F.FunctionalParams(0.0, 0.0))
    d = rep.gate_details["positive_R"]
    assert not d["ok"] and d["min_R"] <= 0 and len(d["witness"]) == 3
    assert rep.verdict == "inapplicable"


def test_silent_dimension_reason():
    rep = H.manifold_hypothesis_check(load_model("s2xs2"), "thm1.2", F.FunctionalParams(0.0, 0.0))
    assert rep.verdict == "inapplicable"
    assert "param_system: paper-silent at this n" in rep.reasons


def test_unequal_product_printed_line_form():
    # unit-volume S2(1) x S2(2) is critical on the line and not Einstein; the printed
    # first term (no |R0| factor) lets the hypotheses hold
    m = load_model("s2xs2-unequal")
    p = F.FunctionalParams(-0.8, 0.3)
    printed = H.manifold_hypothesis_check(m, "thm1.3", p)
    assert printed.verdict == "CONTRADICTION"
    assert printed.margin.min_margin == pytest.approx(373.7, rel=1e-3)
    factor = H.manifold_hypothesis_check(m, "thm1.3", p, line_form="factor")
    assert factor.verdict == "hypotheses-fail"
    assert factor.margin.min_margin < 0


def test_scan_ordering_and_header():
    text = H.scan_region(3, "-1:1", "-0.5:0.5", 5)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(H.CSV_HEADER)
    assert len(lines) == 26
    rows = [l.split(",") for l in lines[1:]]
    ts = [float(r[1]) for r in rows]
    assert ts == sorted(ts)
    assert [float(r[2]) for r in rows[:5]] == sorted(float(r[2]) for r in rows[:5])
    assert H.scan_region(3, "0:1", "0:1", 0) == "n,t,s,systems,flags\n"
    assert H.scan_region(3, "1:0", "0:1", 4) == "n,t,s,systems,flags\n"
    with pytest.raises(ArgumentError):
        H.scan_region(3, "0:1", "0:1", 2001)
    with pytest.raises(ArgumentError):
        H.scan_region(3, "0-1", "0:1", 3)


def test_scan_row_matches_classify():
    text = H.scan_region(4, "-0.5:0.5", "-0.5:0.0", 3)
    for line in text.strip().split("\n")[1:]:
        n, t, s, sys_, flags = line.split(",")
        v = H.classify(H.ParamPoint(int(n), float(t), float(s))).to_json()
        assert sys_ == ";".join(v["systems"])


@pytest.mark.parametrize("label", ["4th-Form-13", "4th-Form-14", "5-Proof-5", "6-Proof-3", "6-Proof-5"])
def test_consequences_hold(label):
    assert H.check_consequence(label, size=5000)["ok"]


def test_empty_region_vacuous():
    rep = H.check_consequence("3-Proof-4", size=2000)
    assert rep["ok"]
    assert {p["n"]: p["samples"] for p in rep["parts"]} == {5: 0, 6: 0}


def test_three_th_counterexample():
    # inside the n = 3 case with s in [-1/4, 1/8) both signs of 8s + 1 occur
    assert "3th-Form-1" in H.classify(H.ParamPoint(3, -1.0, 0.0)).satisfied_systems
    assert not H._sign_pattern("3th-Proof-2", 3, -1.0, 0.0)
    assert not H.check_consequence("3th-Proof-2", dims=(3,), size=2000)["ok"]


def test_five_proof_four_as_printed():
    # holds at n = 3, fails at n = 4 (e.g. s = -0.2 on the line)
    assert H.check_consequence("5-Proof-4", dims=(3,), size=5000)["ok"]
    assert "55th-Form-1" in H.classify(H.ParamPoint(4, -0.3, -0.2)).satisfied_systems
    assert not H._sign_pattern("5-Proof-4", 4, -0.3, -0.2)


def test_admissible_params_deterministic():
    a = H.admissible_params("thm1.1", 5, 10, seed=3)
    b = H.admissible_params("thm1.1", 5, 10, seed=3)
    assert a == b and len(a) == 10
    for sid, t, s in a:
        assert sid in H.classify(H.ParamPoint(5, t, s)).satisfied_systems
    assert H.admissible_params("thm1.2", 4, 5) == []


def test_empty_region_nonvacuous_higher_n():
    rep = H.check_consequence("3-Proof-4", dims=(7, 8), size=5000)
    assert rep["ok"] and rep["samples"] == 10000
