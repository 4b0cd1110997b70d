import json
from math import pi

import numpy as np
import pytest

from quadcurv import models as M
from quadcurv.errors import ArgumentError, ConstructionError


def test_sphere_volumes():
    assert M.make_round_sphere(3).volume == pytest.approx(2 * pi ** 2, rel=1e-14)
    assert M.make_round_sphere(4).volume == pytest.approx(8 * pi ** 2 / 3, rel=1e-14)
    assert M.make_round_sphere(3, 2.0).volume == pytest.approx(16 * pi ** 2, rel=1e-14)


def test_sphere_partition_weights_sum_to_volume():
    m = M.make_round_sphere(3)
    _, w = M.sphere_partition_nodes(m, 48)
    assert 2 * w.sum() == pytest.approx(m.volume, rel=1e-3)


def test_flat_torus_sin2_integral():
    m = M.make_flat_torus(3)
    f = lambda p: np.sin(p.point[..., 0]) ** 2
    assert m.volume == pytest.approx(8 * pi ** 3)
    # homogeneous quadrature is one node; use the grid engine of a perturbed torus with eps = 0
    mt = M.make_perturbed_torus(3, eps=0.0, grid=16)
    assert mt.integrate(f) == pytest.approx(mt.volume / 2, rel=1e-12)


def test_conformal_volume_spectral():
    v = [M.make_conformal_torus(3, [0.1, -0.05], grid=N).volume for N in (12, 24)]
    assert abs(v[0] - v[1]) < 1e-9 * v[1]


def test_normalize_unit_volume():
    m = M.make_flat_torus(3, [2.0, 1.0, 1.0])
    u, c = m.normalize_unit_volume()
    assert c == pytest.approx(2 ** (-1 / 3), rel=1e-14)
    assert u.unit_volume
    assert u.descriptor()["params"]["scale"] == pytest.approx(c)
    same, c1 = u.normalize_unit_volume()
    assert c1 == 1.0 and same is u


def test_scaling_weights_n4_invariant():
    m = M.make_round_sphere(4)
    a = m.integrals()
    b = m.scaled(1.7).integrals()
    for k in ("norm_Rm2", "norm_Ric2", "R2", "norm_W2"):
        assert b[k] == pytest.approx(a[k], rel=1e-12)
    assert b["one"] == pytest.approx(a["one"] * 1.7 ** 4)


def test_product_spheres_einstein():
    m = M.make_product_spheres(2, 1.0, 2, 1.0)
    p = m.pack_at(m.sample_points(3, 0))
    assert np.allclose(p.R, 4.0)
    assert np.max(np.abs(p.ric0)) < 1e-12
    q = M.load_model("s2xs2-unequal").pack_at(np.zeros((1, 4)))
    assert q.R[0] == pytest.approx(2.5)


def test_berger_one_is_round():
    m = M.make_berger_sphere(1.0)
    assert m.volume == pytest.approx(2 * pi ** 2)
    p = m.pack_at(m.sample_points(2, 0))
    assert np.allclose(p.R, 6.0)


@pytest.mark.parametrize("name", ["berger-0.5", "s2xs3", "sphere-4"])
def test_homogeneous_constant(name):
    m = M.load_model(name)
    p = m.pack_at(m.sample_points(10, 5), depth=2)
    for key in ("norm_Rm2", "norm_Ric0_2", "norm_W2"):
        v = p.norms[key]
        assert np.max(v) - np.min(v) < 1e-12 * max(1.0, np.max(v))


@pytest.mark.parametrize("name", ["berger-0.5", "s2xs2-unequal", "sphere-3"])
def test_closed_form_vs_fd(name):
    m = M.load_model(name)
    pts = m.sample_points(2, 11)
    cf = m.pack_at(pts, depth=1)
    fd = m.fd_pack(pts, depth=1)
    assert np.max(np.abs(cf.norms["norm_Rm2"] - fd.norms["norm_Rm2"])) < 1e-5
    assert np.max(np.abs(cf.norms["norm_C2"] - fd.norms["norm_C2"])) < 1e-5


def test_construction_error_reports_point():
    with pytest.raises(ConstructionError) as ei:
        M.make_perturbed_torus(3, eps=2.0, grid=8)
    assert len(ei.value.point) == 3


def test_catalog_and_descriptors():
    assert len(M.CATALOG) == 15
    for name in M.CATALOG:
        m = M.load_model(name)
        again = M.from_descriptor(json.loads(json.dumps(m.descriptor())))
        assert again.n == m.n and again.volume == pytest.approx(m.volume, rel=1e-12)


def test_load_model_errors(tmp_path):
    with pytest.raises(ArgumentError):
        M.load_model("no-such-model")
    with pytest.raises(ArgumentError):
        M.load_model("{not json")
    with pytest.raises(ArgumentError):
        M.from_descriptor({"type": "klein-bottle"})
    with pytest.raises(ArgumentError):
        M.from_descriptor({"type": "berger", "n": 4})
    with pytest.raises(ArgumentError):
        M.make_berger_sphere(2.5)
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"type": "sphere", "n": 4, "params": {"r": 2.0}}))
    assert M.load_model(str(f)).volume == pytest.approx(16 * 8 * pi ** 2 / 3)


def test_min_R_witness():
    m = M.load_model("conformal-torus-3")
    R, x = m.min_R()
    assert np.shape(x) == (3,)
    nodes = m.node_scalars(0)
    assert R == pytest.approx(float(np.min(nodes["R"])))
