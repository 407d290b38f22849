from math import pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from hyperbargmann.grids import BoxSpec, Parity, make_direction_grid, parity_defect, sample, sample_sino
from hyperbargmann.transforms import (FilterMode, FilterSpec, HyperplaneQuadrature, abs_dt_power, dual_radon,
                                      fourier_h, hilbert_t, homogeneous_monomials, inverse_radon,
                                      moment_residual, perp_basis, plancherel_check, radon, radon_sinogram)


def gauss(p):
    return np.exp(-pi * np.sum(p * p, axis=-1))


unit3 = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1).map(
    lambda v: np.array(v) / np.linalg.norm(v))


@given(unit3)
def test_perp_basis_orthonormal(om):
    B = perp_basis(om)
    assert B.shape == (2, 3)
    assert np.allclose(B @ B.T, np.eye(2), atol=1e-12)
    assert np.allclose(B @ om, 0, atol=1e-12)


def test_perp_basis_rejects_non_unit():
    with pytest.raises(ValueError):
        perp_basis([1.0, 1.0])


def test_quadrature_nodes():
    s, w = HyperplaneQuadrature(1.0, 0.5).nodes()
    assert np.allclose(s, [-1, -0.5, 0, 0.5, 1])
    assert np.allclose(w, [0.25, 0.5, 0.5, 0.5, 0.25])


@pytest.mark.parametrize("n", [2, 3])
def test_radon_of_shifted_gaussian(n, rng):
    c = rng.uniform(-0.5, 0.5, n)
    om = rng.normal(size=n)
    om /= np.linalg.norm(om)
    t = np.linspace(-2, 2, 9)
    got = radon(lambda p: gauss(p - c), om, t)
    assert np.allclose(got, np.exp(-pi * (t - c @ om) ** 2), atol=1e-12)


def test_radon_of_grid_function_uses_interpolation():
    g = sample(gauss, BoxSpec(2, 5.0, 201))
    got = radon(g, np.array([0.6, 0.8]), np.array([0.0, 0.5]))
    assert np.allclose(got, np.exp(-pi * np.array([0.0, 0.25])), atol=1e-5)


def test_radon_rejects_nonfinite():
    with pytest.raises(ValueError):
        radon(lambda p: np.full(p.shape[:-1], np.inf), [1.0, 0.0], 0.0)


def test_radon_sinogram_parity_and_pool():
    from concurrent.futures import ThreadPoolExecutor
    d = make_direction_grid(2, 16)
    S = radon_sinogram(lambda p: gauss(p - [0.3, 0]), d, (-4, 4, 81))
    assert S.parity is Parity.EVEN_P
    assert parity_defect(S) < 1e-13
    with ThreadPoolExecutor(2) as ex:
        S2 = radon_sinogram(lambda p: gauss(p - [0.3, 0]), d, (-4, 4, 81), pool=ex)
    assert np.array_equal(S.values, S2.values)


def test_dual_radon_constant():
    d = make_direction_grid(3, 16)
    U = sample_sino(lambda o, t: np.ones_like(t), d, (-3, 3, 61))
    assert dual_radon(U, np.array([0.3, 0.1, -0.2])).real == pytest.approx(4 * pi, rel=1e-12)
    with pytest.raises(ValueError):
        dual_radon(U, np.array([5.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        dual_radon(U.with_values(U.values, Parity.ODD), np.zeros(3))


def test_dual_radon_linear_data():
    # R*(t^2)(x) = int (x.w)^2 dw = pi |x|^2 on the circle
    d = make_direction_grid(2, 32)
    U = sample_sino(lambda o, t: t ** 2, d, (-3, 3, 601))
    x = np.array([0.4, -0.7])
    assert dual_radon(U, x).real == pytest.approx(pi * x @ x, rel=1e-8)


def test_hilbert_of_lorentzian():
    # p.v. int 1/(1+s^2)/(t-s) ds = pi t/(1+t^2)
    d = make_direction_grid(2, 2)
    U = sample_sino(lambda o, t: 1 / (1 + t * t), d, (-200, 200, 8001))
    H = hilbert_t(U)
    t = U.t
    mid = np.abs(t) <= 10
    assert np.max(np.abs(H.values[0, mid] - pi * t[mid] / (1 + t[mid] ** 2))) < 2e-4
    assert H.parity is Parity.SIGNED_PTILDE


def test_hilbert_against_quadrature():
    # independent oracle: principal value through scipy's Cauchy weight
    d = make_direction_grid(2, 2)
    U = sample_sino(lambda o, t: np.exp(-pi * t * t), d, (-8, 8, 801))
    H = hilbert_t(U)
    for t0 in (0.3, 1.1):
        j = int(np.argmin(np.abs(U.t - t0)))
        tj = U.t[j]
        pv, _ = quad(lambda s: np.exp(-pi * s * s), -8, 8, weight="cauchy", wvar=tj)
        assert H.values[0, j].real == pytest.approx(-pv, rel=1e-8)


@pytest.mark.parametrize("n", [2, 3])
def test_filter_routes_agree(n):
    d = make_direction_grid(n, 4)
    U = sample_sino(lambda o, t: np.exp(-pi * t * t), d, (-8, 8, 801))
    a = abs_dt_power(U, n)
    b = abs_dt_power(U, n, FilterMode.FFT_MULTIPLIER)
    assert np.max(np.abs(a.values - b.values)) < 1e-10


def test_filter_n3_is_minus_second_derivative():
    d = make_direction_grid(3, 4)
    U = sample_sino(lambda o, t: np.exp(-pi * t * t), d, (-8, 8, 801))
    t = U.t
    exact = -(4 * pi ** 2 * t * t - 2 * pi) * np.exp(-pi * t * t)
    assert np.max(np.abs(abs_dt_power(U).values - exact)) < 1e-10


def test_filter_spec_validation():
    assert FilterSpec(2).mode is FilterMode.HILBERT_DERIVATIVE
    assert FilterSpec(3).mode is FilterMode.EVEN_DERIVATIVE
    assert FilterSpec.from_cli(2, "multiplier").mode is FilterMode.FFT_MULTIPLIER
    with pytest.raises(ValueError):
        FilterSpec(2, FilterMode.EVEN_DERIVATIVE)
    with pytest.raises(ValueError):
        FilterSpec(3, "hilbert_derivative")
    with pytest.raises(ValueError):
        FilterSpec(1)


@pytest.mark.parametrize("n,res,count,tol", [(2, 128, 321, 1e-3), (3, 32, 161, 1e-2)])
def test_inversion_of_gaussian(n, res, count, tol):
    d = make_direction_grid(n, res)
    U = sample_sino(lambda o, t: np.exp(-pi * t * t), d, (-8, 8, count))
    box = BoxSpec(n, 1.5, 7)
    rec = inverse_radon(U, box=box)
    exact = gauss(rec.points())
    assert np.linalg.norm(rec.values - exact) / np.linalg.norm(exact) < tol


def test_plancherel_n2():
    d = make_direction_grid(2, 64)
    res = plancherel_check(gauss, lambda p: gauss(p - [0.2, -0.1]), 2, d, (-8, 8, 321), BoxSpec(2, 6.0, 121))
    assert res.rel_gap < 1e-4


def test_fourier_h_gaussian_and_roundtrip():
    h = 0.5
    u = sample(gauss, BoxSpec(2, 6.0, 121))
    F = fourier_h(u, h)
    eta = F.points()
    exact = h ** -1 * np.exp(-pi * np.sum(eta * eta, axis=-1) / h ** 2)
    assert np.max(np.abs(F.values - exact)) < 1e-12
    back = fourier_h(F, h, inverse=True, dual_origin=u.origin)
    assert np.max(np.abs(back.values - u.values)) < 1e-12
    assert np.sum(np.abs(F.values) ** 2) * F.cell_volume == pytest.approx(
        np.sum(np.abs(u.values) ** 2) * u.cell_volume, rel=1e-12)


def test_homogeneous_monomials_count():
    om = make_direction_grid(3, 8).directions
    assert homogeneous_monomials(om, 0).shape[1] == 1
    assert homogeneous_monomials(om, 2).shape[1] == 6


@pytest.mark.parametrize("k", [0, 1, 2])
def test_moment_condition(k):
    d = make_direction_grid(2, 32)
    c = np.array([0.3, -0.2])
    R = sample_sino(lambda o, t: np.exp(-pi * (t - (o @ c)[:, None]) ** 2), d, (-8, 8, 801))
    assert moment_residual(R, k) < 1e-6


def test_moment_condition_detects_non_range():
    d = make_direction_grid(2, 32)
    # zeroth moment depends on omega through cos(3 theta): not a degree-0 polynomial
    U = sample_sino(lambda o, t: (1 + 0.5 * (4 * o[:, :1] ** 3 - 3 * o[:, :1])) * np.exp(-pi * t * t),
                    d, (-8, 8, 801))
    assert moment_residual(U, 0) > 0.1
    with pytest.raises(ValueError):
        moment_residual(U, -1)
