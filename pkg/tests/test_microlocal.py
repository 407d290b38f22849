from math import pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperbargmann.bargmann import im_phase
from hyperbargmann.grids import CotangentPointP, canonical_sign, make_direction_grid
from hyperbargmann.microlocal import (CutoffSpec, DecayClass, DecayProfile, LambdaPhiPoint, chart_permutation,
                                      classify, critical_points, decay_scan, degenerate_cutoff_experiment,
                                      degenerate_point, hessian_check, kappa_B, kappa_B_inv, kappa_T,
                                      mixed_det, mixed_det_closed_form, phase_gradient, phase_hessian,
                                      smoothstep, wavefront_map)
from hyperbargmann.phantoms import gaussian

vec = lambda n, lo=-2.0, hi=2.0: st.lists(st.floats(lo, hi), min_size=n, max_size=n).map(np.array)
nonzero = lambda n: vec(n).filter(lambda v: np.linalg.norm(v) > 0.1)


@pytest.mark.parametrize("n", [2, 3])
@given(data=st.data())
def test_kappa_round_trips(n, data):
    x = data.draw(vec(n))
    xi = data.draw(nonzero(n))
    p, q = kappa_B_inv(x, xi)
    assert canonical_sign(p.omega, p.t) > 0
    assert q.allclose(p.antipode())
    for r in (p, q):
        img = kappa_B(r)
        assert np.allclose(img.x, x, atol=1e-10) and np.allclose(img.xi, xi, atol=1e-10)
        back = kappa_B_inv(img.x, img.xi)
        assert back[0].allclose(r.canonical(), atol=1e-10)


def test_kappa_matches_fiber_formula():
    om = np.array([0.0, 0.6, 0.8])
    eta_f = np.array([1.0, 0.8, -0.6])
    p = CotangentPointP.from_fiber(om, 0.7, eta_f, 0.3)
    img = kappa_B(p)
    assert np.allclose(img.z, 0.7 * om - eta_f - 0.3j * om)
    assert np.allclose(img.zeta_dual, 2 * pi * 0.3 * om)


def test_kappa_zero_section_and_rejects():
    p = CotangentPointP([1.0, 0.0], 0.5, [0.0, 0.0], 0.0)
    assert np.allclose(kappa_B(p).z, [0.5, 0.0])
    with pytest.raises(ValueError):
        kappa_B(CotangentPointP([1.0, 0.0], 0.5, [0.0, 1.0], 0.0))
    with pytest.raises(TypeError):
        kappa_B((1, 2))
    with pytest.raises(ValueError):
        kappa_B_inv([1.0, 0.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        wavefront_map([p])


def test_lambda_phi_invariant():
    assert kappa_T([1.0, 2.0], [0.5, -1.0]).allclose(LambdaPhiPoint([1 - 0.5j, 2 + 1j], [pi, -2 * pi]))
    with pytest.raises(ValueError):
        LambdaPhiPoint([1 - 0.5j], [1.0])


def test_chart_permutation():
    assert list(chart_permutation([0.1, -0.9, 0.3])) == [0, 2, 1]
    assert chart_permutation([0.6, 0.6, 0.0])[-1] == 1


@pytest.mark.parametrize("n", [2, 3])
def test_critical_point_and_hessian(n, rng):
    for _ in range(5):
        x = rng.normal(size=n)
        xi = rng.normal(size=n)
        cp = critical_points(x, xi)
        assert cp.grad_norm <= 1e-8
        rep = hessian_check(x, xi)
        assert rep.eigen_min > 0
        assert rep.det_rel_err < 1e-6
        if n == 3:
            assert rep.degenerate_eigen_absmin < 1e-6
        else:
            assert rep.degenerate_eigen_min < 0


def test_degenerate_point_is_critical():
    x, xi = np.array([0.3, -0.2, 1.0]), np.array([1.0, 0.5, -0.2])
    om, t = degenerate_point(x, xi)
    assert abs(om @ xi) < 1e-14 and t == pytest.approx(x @ om)
    assert np.linalg.norm(phase_gradient(x, xi, om, t)) < 1e-8
    assert np.linalg.eigvalsh(phase_hessian(x, xi, om, t))[0] <= 1e-6


def test_phase_gradient_elsewhere_nonzero():
    x, xi = np.array([0.3, -0.2]), np.array([1.0, 0.5])
    assert np.linalg.norm(phase_gradient(x, xi, np.array([0.6, 0.8]), 0.1)) > 0.1


def test_mixed_det_closed_form():
    x, xi = np.array([0.2, 0.1, -0.3]), np.array([0.5, -1.0, 2.0])
    om = xi / np.linalg.norm(xi)
    d = mixed_det(x, xi, om, x @ om)
    c = mixed_det_closed_form(xi, om)
    assert abs(d - c) / abs(c) < 1e-8


def test_im_phase_minimum_structure():
    # Im phi is minimized on the sphere at the critical point when x.omega = t
    x, xi = np.array([0.1, 0.4]), np.array([0.0, 2.0])
    val = im_phase(x, xi, np.array([0.0, 1.0]), 0.4)
    assert val == pytest.approx(-pi * 4)


def test_classify():
    hs = np.array([0.25, 0.2, 0.16, 0.125])
    assert classify(hs, np.exp(-1 / hs))[2] is DecayClass.EXPONENTIAL
    # power laws look exponential against 1/h unless h is small (slope about -5 h)
    small = np.array([0.0016, 0.0012, 0.001, 0.0008])
    assert classify(small, small ** 5)[2] is DecayClass.RAPID
    assert classify(small, small ** 0.5)[2] is DecayClass.SLOW
    assert classify(hs, np.ones(4))[2] is DecayClass.SLOW
    s1, s2, cls, clamped = classify(hs, [1e-320, 1e-320, 0.0, 0.0])
    assert clamped


def test_decay_profile_validation():
    with pytest.raises(ValueError):
        DecayProfile((), ((0.1, 1.0), (0.2, 1.0)), 0.0, 0.0, DecayClass.SLOW)
    with pytest.raises(ValueError):
        DecayProfile((), ((0.2, -1.0), (0.1, 1.0)), 0.0, 0.0, DecayClass.SLOW)


def test_decay_scan_gaussian_sinogram():
    g = gaussian(2)
    d = make_direction_grid(2, 256)
    prof = decay_scan(g.sinogram(d, (-4, 4, 2001)), [1.0, 0.0], [1.0, 0.0], [0.25, 0.2, 0.16, 0.125])
    assert prof.classification is DecayClass.EXPONENTIAL
    with pytest.raises(ValueError):
        decay_scan(g.sinogram(d, (-4, 4, 201)), [1.0, 0.0], [1.0, 0.0], [0.25, 0.2, 0.16])
    with pytest.raises(TypeError):
        decay_scan(3.0, [1.0, 0.0], [1.0, 0.0], [0.25, 0.2, 0.16, 0.125])


@given(st.floats(-1, 2))
def test_smoothstep(u):
    v = smoothstep(u)
    assert 0 <= v <= 1
    if u <= 0:
        assert v == 0
    if u >= 1:
        assert v == 1


def test_smoothstep_c2():
    e = 1e-4
    for u0 in (0.0, 1.0):
        d2 = (smoothstep(u0 + e) - 2 * smoothstep(u0) + smoothstep(u0 - e)) / e ** 2
        assert abs(d2) < 1e-2


def test_cutoff_spec():
    spec = CutoffSpec((0.0, 0.0), (2.0, 0.0))
    assert spec.rho == pytest.approx(0.4)
    assert spec.T0 == pytest.approx(0.4) and spec.T1 == pytest.approx(1.4)
    om = np.array([[1.0, 0.0], [0.0, 1.0]])
    chi = spec.chi(om, np.array([[0.0, 5.0]]))
    assert np.allclose(chi, [[0.0, 0.0], [1.0, 0.0]])
    assert len(spec.probe_points()) == 25
    with pytest.raises(ValueError):
        CutoffSpec((0.0, 0.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        CutoffSpec((0.0, 0.0), (2.0, 0.0), rho=1.0)
    with pytest.raises(ValueError):
        CutoffSpec((0.0, 0.0), (1.0, 0.0), rho=0.5)  # cone too narrow for a ramp


def test_cutoff_experiment_n2():
    g = gaussian(2)
    d = make_direction_grid(2, 128)
    U = g.sinogram(d, (-8, 8, 801))
    res = degenerate_cutoff_experiment(U, CutoffSpec((0.0, 0.0), (2.0, 0.0)), [0.5, 0.25, 0.125, 0.0625])
    assert res.ok and res.measured_rate >= 0.9 * res.bound_rate
