import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadcurv import tensors as T
from quadcurv.errors import ArgumentError


def kn_loops(a, b):
    n = a.shape[0]
    out = np.zeros((n,) * 4)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        out[i, j, k, l] = (a[i, k] * b[j, l] + a[j, l] * b[i, k]
                           - a[i, l] * b[j, k] - a[j, k] * b[i, l])
    return out


def space_form(n, K):
    g = np.eye(n)
    return 0.5 * K * T.kn(g, g)


def test_traceless_diag():
    a = T.SymTensor2(np.diag([2.0, 1.0, 1.0]))
    out = T.traceless_part(a).entries
    assert np.allclose(out, np.diag([2 / 3, -1 / 3, -1 / 3]), atol=1e-15)


def test_traceless_with_metric():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((4, 4))
    frame = T.MetricFrame.from_metric(m @ m.T + 4 * np.eye(4))
    a = T.SymTensor2(T.sym(rng.standard_normal((4, 4))))
    out = T.traceless_part(a, frame).entries
    assert abs(np.sum(frame.g_inv * out)) < 1e-12


@pytest.mark.parametrize("n", range(3, 9))
def test_gg_norm(n):
    g = np.eye(n)
    assert np.isclose(T.norm2(T.kn(g, g)), 8 * n * (n - 1), rtol=1e-13)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_kn_matches_loops_and_traceless_norm(n):
    rng = np.random.default_rng(n)
    a, b = T.random_sym_batch(rng, 2, n)
    assert np.allclose(T.kn(a, b), kn_loops(a, b), atol=1e-13)
    h = T.traceless(a)
    lhs = T.norm2(T.kn(h, np.eye(n)))
    assert np.isclose(lhs, 4 * (n - 2) * T.norm2(h), rtol=1e-12)


def test_kn_is_curvature_tensor():
    rng = np.random.default_rng(0)
    a, b = T.random_sym_batch(rng, 2, 5)
    t = T.kulkarni_nomizu(T.SymTensor2(a), T.SymTensor2(b)).entries
    assert T.curvature_symmetry_residual(t) < 1e-13
    assert np.max(np.abs(T.bianchi_sum(t))) < 1e-13


@pytest.mark.parametrize("n", [3, 4, 6])
def test_space_form_contractions(n):
    K = 0.7
    rm = space_form(n, K)
    assert np.isclose(rm[0, 1, 0, 1], K)
    ric = T.ricci_contract(rm)
    assert np.allclose(ric, (n - 1) * K * np.eye(n))
    w = T.AlgebraicCurvatureTensor(rm)
    assert np.allclose(T.contract_ww(w).entries, 2 * K ** 2 * (n - 1) * np.eye(n))
    s = T.random_traceless_sym(n, 3)
    out = T.contract_curv_sym(w, s).entries
    assert np.allclose(out, -K * s.entries, atol=1e-13)


def test_ww_loops():
    rng = np.random.default_rng(9)
    w = T.random_weyl_batch(rng, 1, 4)[0]
    brute = np.einsum("ikpq,jkpq->ij", w, w)
    assert np.allclose(T.ww(w), brute)


def test_contractions_with_metric_agree_with_frame():
    # a tensor in coordinates and its frame components give the same scalars
    rng = np.random.default_rng(5)
    n = 4
    m = rng.standard_normal((n, n))
    g = m @ m.T + n * np.eye(n)
    e = T.orthonormal_frame(g)
    assert np.allclose(e.T @ g @ e, np.eye(n), atol=1e-12)
    rm = T.random_curvature_batch(rng, 1, n)[0]
    rm_f = T.to_frame(rm, e, 4)
    ginv = np.linalg.inv(g)
    assert np.isclose(T.norm2(rm, ginv), T.norm2(rm_f), rtol=1e-11)
    w = T.weyl_part(rm, g, ginv)
    w_f = T.weyl_part(rm_f)
    assert np.allclose(T.to_frame(w, e, 4), w_f, atol=1e-11)
    lhs = T.trace(T.ww(w, ginv), ginv)
    assert np.isclose(lhs, T.norm2(w_f), rtol=1e-11)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_random_weyl_traces(n):
    w = T.random_weyl_like(n, 11).entries
    assert np.max(np.abs(T.single_traces(w))) < 1e-12
    assert np.max(np.abs(T.bianchi_sum(w))) < 1e-12
    assert T.norm2(w) > 0


def test_random_weyl_n3_zero_and_deterministic():
    assert np.all(T.random_weyl_like(3, 4).entries == 0)
    a = T.random_weyl_like(5, 42).entries
    b = T.random_weyl_like(5, 42).entries
    assert np.array_equal(a, b)
    assert not np.array_equal(a, T.random_weyl_like(5, 43).entries)


def test_bad_inputs():
    with pytest.raises(ArgumentError):
        T.SymTensor2(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ArgumentError):
        T.random_weyl_like(2, 0)
    with pytest.raises(ArgumentError):
        T.random_traceless_sym(9, 0)
    with pytest.raises(ArgumentError):
        T.MetricFrame(np.eye(3), 2 * np.eye(3))
    with pytest.raises(ArgumentError):
        T.kulkarni_nomizu(T.SymTensor2(np.eye(3)), T.SymTensor2(np.eye(4)))
    bad = np.zeros((3, 3, 3, 3))
    bad[0, 1, 0, 1] = 1.0
    with pytest.raises(ArgumentError):
        T.AlgebraicCurvatureTensor(bad)


def test_cotton_residuals_reports():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    res = T.CottonTensor3(c).residuals()
    assert res["antisym"] == 0.0 and res["trace_ij"] == 0.0


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 6), seed=st.integers(0, 2 ** 31))
def test_projection_is_idempotent(n, seed):
    rng = np.random.default_rng(seed)
    t = T.random_curvature_batch(rng, 1, n)[0]
    assert np.allclose(T.project_curvature(t), t, atol=1e-12)
    q = T.random_orthogonal(rng, n)
    # curvature class is preserved by rotations
    tr = T.to_frame(t, q, 4)
    assert T.curvature_symmetry_residual(tr) < 1e-11
    assert np.isclose(T.norm2(tr), T.norm2(t), rtol=1e-11)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(4, 7), seed=st.integers(0, 2 ** 31))
def test_weyl_decomposition_orthogonal(n, seed):
    rng = np.random.default_rng(seed)
    rm = T.random_curvature_batch(rng, 1, n)[0]
    w = T.weyl_part(rm)
    rest = rm - w
    assert abs(T.inner(w, rest)) < 1e-10 * max(1.0, T.norm2(rm))
