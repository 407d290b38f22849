from math import pi

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erf

from hyperbargmann.bargmann import bargmann_T
from hyperbargmann.grids import Parity, make_direction_grid
from hyperbargmann.phantoms import Component, PhantomSpec, ball_husimi, gaussian, unit_disk
from hyperbargmann.transforms import radon


def test_component_validation():
    with pytest.raises(ValueError):
        Component("square")
    with pytest.raises(ValueError):
        Component("gaussian", scale=0.0)
    with pytest.raises(ValueError):
        PhantomSpec(4)
    with pytest.raises(ValueError):
        PhantomSpec(2, (Component("shifted_gaussian", (0.0, 0.0, 0.0)),))


@pytest.mark.parametrize("n", [2, 3])
def test_gaussian_radon_matches_numeric(n):
    ph = PhantomSpec(n, (Component("shifted_gaussian", tuple([0.3, -0.2, 0.1][:n]), 0.7, 2.0),
                         Component("gaussian", None, 1.2, -0.5)))
    om = np.array([[0.6, 0.8, 0.0][:n]])
    om = om / np.linalg.norm(om)
    t = np.array([[-0.5, 0.0, 0.9]])
    assert np.allclose(ph.radon(om, t), radon(ph, om[0], t[0]), atol=1e-11)


def test_disk_radon():
    ph = unit_disk(2, 0.8)
    t = np.array([[0.0, 0.5, 0.9]])
    assert np.allclose(ph.radon(np.array([[1.0, 0.0]]), t), [[1.6, 2 * np.sqrt(0.64 - 0.25), 0.0]])


def test_ball_radon_n3():
    ph = PhantomSpec(3, (Component("ball_indicator"),))
    t = np.array([[0.0, 0.5]])
    assert np.allclose(ph.radon(np.array([[0.0, 0.0, 1.0]]), t), [[pi, pi * 0.75]])


@pytest.mark.parametrize("t0", [0.4, 2.5])
def test_hilbert_radon_oracles(t0):
    om = np.array([[1.0, 0.0]])
    g = gaussian(2)
    pv, _ = quad(lambda s: np.exp(-pi * s * s), -10, 10, weight="cauchy", wvar=t0)
    assert g.hilbert_radon(om, np.array([[t0]]))[0, 0].real == pytest.approx(-pv, rel=1e-9)
    d = unit_disk(2)
    pv, _ = quad(lambda s: 2 * np.sqrt(1 - s * s), -1, 1, weight="cauchy", wvar=t0)
    assert d.hilbert_radon(om, np.array([[t0]]))[0, 0].real == pytest.approx(-pv, rel=1e-9)


def test_hilbert_radon_ball_n3_not_available():
    with pytest.raises(NotImplementedError):
        PhantomSpec(3, (Component("ball_indicator"),)).hilbert_radon(np.eye(3)[:1], np.zeros((1, 1)))


def test_bargmann_data_parity():
    assert gaussian(2).bargmann_data().parity is Parity.SIGNED_PTILDE
    assert gaussian(3).bargmann_data().parity is Parity.EVEN_P
    d = make_direction_grid(2, 8)
    assert gaussian(2).sinogram(d, (-4, 4, 41)).parity is Parity.SIGNED_PTILDE
    assert gaussian(2).sinogram(d, (-4, 4, 41), hilbert=False).parity is Parity.EVEN_P


def test_closed_form_T_matches_quadrature():
    ph = gaussian(2, center=[0.3, -0.2], scale=0.8, weight=1.5)
    z = np.array([0.1 - 0.6j, -0.2 + 0.3j])
    assert ph.bargmann_T(z, 0.5) == pytest.approx(bargmann_T(ph, z, 0.5), rel=1e-10)
    assert ph.bargmann_T(z, 0.5, weighted=True) == pytest.approx(
        bargmann_T(ph, z, 0.5, weighted=True), rel=1e-10)
    with pytest.raises(ValueError):
        unit_disk().bargmann_T(z, 0.5)


def _disk_husimi_oracle(x, xi, h):
    # exact chord limits: erf in y2, adaptive quadrature in y1
    k = np.sqrt(pi / h)

    def inner(y1):
        b = np.sqrt(1 - y1 * y1)
        e = lambda y2: erf(k * (y2 - x[1] + 1j * xi[1]))
        v2 = np.sqrt(h) / 2 * (e(b) - e(-b))
        d1 = x[0] - y1
        return np.exp(-pi * d1 * d1 / h + 2j * pi * d1 * xi[0] / h) * v2

    re, _ = quad(lambda y: inner(y).real, -1, 1, epsabs=1e-14, limit=200)
    im, _ = quad(lambda y: inner(y).imag, -1, 1, epsabs=1e-14, limit=200)
    return np.sqrt(2) * h ** -1.5 * (re + 1j * im) * np.exp(-pi * xi[1] ** 2 / h)


@pytest.mark.parametrize("x,xi,h", [((0.9, 0.1), (1.0, 0.0), 0.25), ((0.0, 0.3), (0.6, -0.8), 0.1)])
def test_ball_husimi_matches_oracle(x, xi, h):
    x, xi = np.array(x), np.array(xi)
    assert ball_husimi(x, xi, h) == pytest.approx(_disk_husimi_oracle(x, xi, h), rel=1e-9, abs=1e-14)


def test_flags():
    assert gaussian(2).smooth and not unit_disk().smooth
    assert PhantomSpec(2, (Component("gaussian", weight=0.0),)).is_zero
