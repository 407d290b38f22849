"""Radon transform, its dual, the t-filters and the h-Fourier transform.

Sinogram operations act row by row (one row per direction) on a zero-padded
FFT of the t samples.  Frequencies follow the ``exp(-2 pi i t tau)``
convention, so ``d/dt`` has symbol ``2 pi i tau``.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations_with_replacement
from math import pi

import numpy as np
from scipy import ndimage

from .grids import GridFunction, Parity, Sinogram, sample
from .special import inversion_constant, plancherel_constant


class FilterMode(str, Enum):
    """How ``|D_t|^{n-1}`` is applied."""

    EVEN_DERIVATIVE = "even_derivative"
    HILBERT_DERIVATIVE = "hilbert_derivative"
    FFT_MULTIPLIER = "fft_multiplier"


@dataclass(frozen=True)
class FilterSpec:
    """Dimension plus filter route; ``mode=None`` picks the derivative route for ``n``."""

    n: int
    mode: FilterMode = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("filter needs n >= 2")
        mode = self.mode
        if mode is None:
            mode = FilterMode.EVEN_DERIVATIVE if self.n % 2 else FilterMode.HILBERT_DERIVATIVE
        mode = FilterMode(mode)
        if mode is FilterMode.EVEN_DERIVATIVE and self.n % 2 == 0:
            raise ValueError("even_derivative route exists only for odd n")
        if mode is FilterMode.HILBERT_DERIVATIVE and self.n % 2 == 1:
            raise ValueError("hilbert_derivative route exists only for even n")
        object.__setattr__(self, "mode", mode)

    @classmethod
    def from_cli(cls, n, name):
        """Map the CLI names ``derivative`` / ``multiplier`` to a spec."""
        if name == "multiplier":
            return cls(n, FilterMode.FFT_MULTIPLIER)
        if name == "derivative":
            return cls(n)
        return cls(n, name)


@dataclass(frozen=True)
class HyperplaneQuadrature:
    """Trapezoid rule on ``[-half_width, half_width]^{n-1}`` inside a hyperplane."""

    half_width: float = 6.0
    step: float = 0.1
    chunk: int = 2_000_000

    def nodes(self):
        m = int(round(2 * self.half_width / self.step))
        s = np.linspace(-self.half_width, self.half_width, m + 1)
        w = np.full(m + 1, s[1] - s[0])
        w[[0, -1]] *= 0.5
        return s, w


def _unit(omega):
    omega = np.asarray(omega, float)
    if abs(np.linalg.norm(omega) - 1) > 1e-12:
        raise ValueError(f"omega must be a unit vector, |omega| = {np.linalg.norm(omega)}")
    return omega


def perp_basis(omega):
    """Orthonormal basis of ``omega^perp``, rows of an ``(n-1, n)`` array.

    Gram-Schmidt on the standard basis vectors in order of increasing
    ``|omega_j|`` (stable sort, so ties go to the smaller index).
    """
    omega = _unit(omega)
    n = omega.size
    basis = [omega]
    for j in np.argsort(np.abs(omega), kind="stable"):
        v = np.zeros(n)
        v[j] = 1.0
        for b in basis:
            v -= (v @ b) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == n:
            break
    return np.array(basis[1:])


def grid_interpolator(u):
    """Cubic-spline evaluator for a GridFunction, zero outside the box."""
    re = ndimage.spline_filter(u.values.real, order=3, mode="constant")
    im = ndimage.spline_filter(u.values.imag, order=3, mode="constant")

    def f(points):
        points = np.asarray(points, float)
        idx = (points - u.origin) / u.spacing
        coords = np.moveaxis(idx, -1, 0).reshape(u.n, -1)
        kw = dict(order=3, mode="constant", cval=0.0, prefilter=False)
        vals = ndimage.map_coordinates(re, coords, **kw) + 1j * ndimage.map_coordinates(im, coords, **kw)
        return vals.reshape(points.shape[:-1])

    return f


def _as_callable(u):
    return grid_interpolator(u) if isinstance(u, GridFunction) else u


def radon(u, omega, t, quad=None):
    """Integral of ``u`` over the hyperplane ``{x : x.omega = t}``.

    Parameters
    ----------
    u : callable or GridFunction
        A callable receives points of shape ``(..., n)``.
    omega : array_like
        Unit normal.
    t : float or array_like
        Offsets; the result has the shape of ``t``.
    quad : HyperplaneQuadrature, optional
        Truncated trapezoid rule inside the hyperplane.
    """
    quad = quad or HyperplaneQuadrature()
    omega = _unit(omega)
    f = _as_callable(u)
    basis = perp_basis(omega)
    s, w = quad.nodes()
    mesh = np.meshgrid(*([s] * len(basis)), indexing="ij")
    offs = sum(m.reshape(-1, 1) * b for m, b in zip(mesh, basis))
    wts = np.ones(1)
    for _ in basis:
        wts = np.multiply.outer(wts, w).ravel()
    t = np.asarray(t, float)
    flat = t.ravel()
    out = np.empty(flat.size, complex)
    step = max(1, quad.chunk // len(offs))
    for i in range(0, flat.size, step):
        tt = flat[i:i + step]
        pts = tt[:, None, None] * omega + offs[None]
        vals = np.asarray(f(pts), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite integrand in radon")
        out[i:i + step] = vals @ wts
    return out.reshape(t.shape) if t.ndim else complex(out[0])


def radon_sinogram(u, dirs, t_spec, quad=None, pool=None):
    """Sample ``R u`` on ``dirs`` times the t axis ``(t_min, t_max, t_count)``.

    ``pool`` is an optional executor; ``pool.map`` keeps direction order, so
    the result does not depend on the number of workers.
    """
    t_min, t_max, t_count = t_spec
    t = np.linspace(t_min, t_max, t_count)
    f = _as_callable(u)

    def row(omega):
        return radon(f, omega, t, quad)

    mapper = pool.map if pool is not None else map
    rows = list(mapper(row, list(dirs.directions)))
    return Sinogram(dirs, t_min, t_max, t_count, np.array(rows), Parity.EVEN_P)


def dual_radon(U, x, chunk=200_000):
    """``R* U(x) = int_{S^{n-1}} U(omega, x.omega) d omega``.

    Cubic interpolation in t, clamped at the grid ends; ``x.omega`` outside
    ``[t_min, t_max]`` raises ``ValueError``.
    """
    if U.parity is not Parity.EVEN_P:
        raise ValueError("dual_radon expects an even_P sinogram")
    x = np.asarray(x, float)
    pts = x.reshape(-1, U.n)
    om = U.dirs.directions
    m = len(om)
    re = ndimage.spline_filter(U.values.real, order=3, mode="nearest")
    im = ndimage.spline_filter(U.values.imag, order=3, mode="nearest")
    kw = dict(order=3, mode="nearest", prefilter=False)
    out = np.empty(len(pts), complex)
    step = max(1, chunk // m)
    slack = 1e-9 * max(1.0, abs(U.t_max), abs(U.t_min))
    for i in range(0, len(pts), step):
        tt = pts[i:i + step] @ om.T
        if tt.size and (tt.min() < U.t_min - slack or tt.max() > U.t_max + slack):
            raise ValueError(f"x.omega outside t grid [{U.t_min}, {U.t_max}]")
        rows = np.broadcast_to(np.arange(m, dtype=float), tt.shape)
        coords = np.stack([rows.ravel(), ((tt - U.t_min) / U.dt).ravel()])
        vals = ndimage.map_coordinates(re, coords, **kw) + 1j * ndimage.map_coordinates(im, coords, **kw)
        out[i:i + step] = vals.reshape(tt.shape) @ U.dirs.weights
    return out.reshape(x.shape[:-1]) if x.ndim > 1 else complex(out[0])


def _padded_len(count, pad):
    return 1 << int(np.ceil(np.log2(pad * count)))


def _spectral(U, symbols, pad=4, rows=64):
    """Apply ``symbols`` (callables of tau) one after another, one FFT round trip each.

    The t samples are zero-padded to ``pad`` times their length (next power of
    two) so the circular convolution does not wrap onto the data; rows are
    processed in blocks of ``rows`` to bound memory.
    """
    if U.t_count < 2:
        raise ValueError("t grid needs at least two nodes")
    npad = _padded_len(U.t_count, pad)
    tau = np.fft.fftfreq(npad, U.dt)
    mults = []
    for sym in symbols:
        mult = sym(tau).astype(complex)
        mult[npad // 2] = 0.0  # Nyquist bin has no sign
        mults.append(mult)
    out = np.empty(U.values.shape, complex)
    for i in range(0, len(U.dirs), rows):
        work = np.zeros((min(rows, len(U.dirs) - i), npad), complex)
        work[:, :U.t_count] = U.values[i:i + rows]
        for mult in mults:
            work = np.fft.ifft(np.fft.fft(work, axis=1) * mult, axis=1)
        out[i:i + rows] = work[:, :U.t_count]
    return out


def _spectral_mirror(U, symbol, rows=64):
    """Apply a local (polynomial) symbol on the mirror extension of each row.

    The even reflection about both ends is continuous, so constants and other
    data that do not vanish at the grid ends are differentiated without
    ringing.
    """
    if U.t_count < 3:
        raise ValueError("t grid needs at least three nodes")
    m = 2 * U.t_count - 2
    mult = symbol(np.fft.fftfreq(m, U.dt)).astype(complex)
    out = np.empty(U.values.shape, complex)
    for i in range(0, len(U.dirs), rows):
        block = U.values[i:i + rows]
        ext = np.concatenate([block, block[:, -2:0:-1]], axis=1)
        out[i:i + rows] = np.fft.ifft(np.fft.fft(ext, axis=1) * mult, axis=1)[:, :U.t_count]
    return out


# symbols with a kink at tau = 0 produce 1/t^2 tails; pad more for those
_PAD_SMOOTH = 2
_PAD_KINK = 16


def _hilbert_symbol(tau):
    return -1j * pi * np.sign(tau)


def _derivative_symbol(order):
    return lambda tau: (2j * pi * tau) ** order


def _moments01(U):
    w = np.full(U.t_count, U.dt)
    w[[0, -1]] *= 0.5
    return U.values @ w, U.values @ (w * U.t)


def _wrap_coefficient(U, pad):
    # periodizing 1/t with period L gives (pi/L) cot(pi t/L) = 1/t - pi^2 t / (3 L^2) + O(L^-4)
    L = _padded_len(U.t_count, pad) * U.dt
    return pi ** 2 / (3 * L * L)


def hilbert_t(U, pad=_PAD_KINK):
    """``H U(t) = p.v. int U(s) / (t - s) ds`` in t, per direction.

    Fourier multiplier ``-i pi sgn(tau)`` with value 0 at ``tau = 0``, plus
    the leading correction for the periodized kernel.  The output has the
    opposite t-reflection parity of the input.
    """
    vals = _spectral(U, [_hilbert_symbol], pad)
    m0, m1 = _moments01(U)
    vals = vals + _wrap_coefficient(U, pad) * (m0[:, None] * U.t[None, :] - m1[:, None])
    return U.with_values(vals, Parity.from_sign(-U.parity.sign(U.n), U.n))


def abs_dt_power(U, n=None, mode=None, pad=None):
    """``|D_t|^{n-1} U``, symbol ``|2 pi tau|^{n-1}``.

    Parameters
    ----------
    U : Sinogram
    n : int, optional
        Dimension; defaults to ``U.n``.
    mode : FilterMode or str, optional
        ``even_derivative`` (odd ``n = 2k+1``): ``(-1)^k d^{2k}/dt^{2k}``,
        local, so computed on the mirror extension of the t grid.
        ``hilbert_derivative`` (even ``n = 2k``):
        ``(-1)^{k-1} / pi * d^{2k-1}/dt^{2k-1} H``.
        ``fft_multiplier``: the symbol directly.  The default is the derivative
        route for ``n``.
    """
    spec = FilterSpec(U.n if n is None else n, mode)
    n = spec.n
    if pad is None:
        pad = _PAD_SMOOTH if n % 2 else _PAD_KINK
    if n == 2 and spec.mode is not FilterMode.EVEN_DERIVATIVE:
        # d/dt of the periodized-kernel correction in hilbert_t
        wrap = _wrap_coefficient(U, pad) / pi * _moments01(U)[0][:, None]
    else:
        wrap = 0.0
    if spec.mode is FilterMode.FFT_MULTIPLIER:
        vals = _spectral(U, [lambda tau: np.abs(2 * pi * tau) ** (n - 1)], pad)
    elif spec.mode is FilterMode.EVEN_DERIVATIVE:
        k = (n - 1) // 2
        vals = (-1) ** k * _spectral_mirror(U, _derivative_symbol(2 * k))
    else:
        k = n // 2
        vals = (-1) ** (k - 1) / pi * _spectral(U, [_hilbert_symbol, _derivative_symbol(2 * k - 1)], pad)
    return U.with_values(vals + wrap)


def _dual_axis(count, step, h):
    return h / (count * step)


def fourier_h(u, h, inverse=False, dual_origin=None):
    """``F_h u(eta) = h^{-n/2} int exp(-2 pi i y.eta / h) u(y) dy`` on the reciprocal grid.

    The dual grid has spacing ``h / (N * dy)`` per axis and, unless
    ``dual_origin`` is given, is centred so that node ``N // 2`` sits at 0.
    ``inverse=True`` flips the sign of the exponent (``F_h^*``); calling it
    with ``dual_origin=u_original.origin`` recovers the original samples.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    sign = 1 if inverse else -1
    vals = np.array(u.values, dtype=complex)
    d_eta = np.array([_dual_axis(u.shape[j], u.spacing[j], h) for j in range(u.n)])
    if dual_origin is None:
        eta0 = -np.array([u.shape[j] // 2 for j in range(u.n)]) * d_eta
    else:
        eta0 = np.asarray(dual_origin, float)
    for j in range(u.n):
        N, dy, y0 = u.shape[j], u.spacing[j], u.origin[j]
        idx = np.arange(N)
        bshape = [1] * u.n
        bshape[j] = N
        pre = np.exp(sign * 2j * pi * idx * dy * eta0[j] / h).reshape(bshape)
        post = np.exp(sign * 2j * pi * y0 * (eta0[j] + idx * d_eta[j]) / h).reshape(bshape)
        f = np.fft.ifft(vals * pre, axis=j) * N if inverse else np.fft.fft(vals * pre, axis=j)
        vals = f * post * dy / np.sqrt(h)
    return GridFunction(u.n, eta0, d_eta, u.shape, vals)


def inverse_radon(U, n=None, box=None, mode=None, points=None):
    """Filtered backprojection ``c^{-1} R*(|D_t|^{n-1} U)``.

    Evaluates on ``box`` (a BoxSpec) and returns a GridFunction, or on an
    explicit ``points`` array and returns an array.
    """
    n = U.n if n is None else n
    filtered = abs_dt_power(U, n, mode)
    c = inversion_constant(n)
    if points is not None:
        return dual_radon(filtered, points) / c
    proto = sample(lambda p: np.zeros(p.shape[:-1]), box)
    return proto.with_values(dual_radon(filtered, proto.points()) / c)


@dataclass(frozen=True)
class PlancherelResult:
    lhs: complex
    rhs: complex
    rel_gap: float


def plancherel_check(u, v, n, dirs, t_spec, box, quad=None, mode=None, pool=None):
    """Compare ``c int u v dx`` with ``iint_{P^n} |D_t|^{n-1} Ru . Rv d omega dt``.

    The hyperplane-space integral is half the integral over
    ``S^{n-1} x R``.  ``c = (2 pi)^{n-1}``.
    """
    gu = u if isinstance(u, GridFunction) else sample(u, box)
    gv = v if isinstance(v, GridFunction) else sample(v, box)
    lhs = plancherel_constant(n) * gu.with_values(gu.values * gv.values).integrate()
    Ru = radon_sinogram(u, dirs, t_spec, quad, pool)
    Rv = Ru if v is u else radon_sinogram(v, dirs, t_spec, quad, pool)
    DRu = abs_dt_power(Ru, n, mode)
    rhs = 0.5 * complex(dirs.weights @ (DRu.values * Rv.values).sum(axis=1) * Ru.dt)
    gap = abs(lhs - rhs) / abs(lhs) if lhs != 0 else abs(rhs)
    return PlancherelResult(complex(lhs), rhs, float(gap))


def homogeneous_monomials(omega, k):
    """Design matrix of all degree-``k`` monomials in the components of ``omega``."""
    omega = np.asarray(omega, float)
    cols = [np.prod(omega[:, list(c)], axis=1) if c else np.ones(len(omega))
            for c in combinations_with_replacement(range(omega.shape[1]), k)]
    return np.stack(cols, axis=1)


def moment_residual(U, k):
    """Relative least-squares residual of ``m_k(omega) = int U t^k dt`` against
    homogeneous polynomials of degree ``k`` in ``omega``.

    Returns 0 when all moments vanish.
    """
    if int(k) != k or k < 0:
        raise ValueError("k must be a non-negative integer")
    t = U.t
    w = np.full(U.t_count, U.dt)
    w[[0, -1]] *= 0.5
    m = U.values @ (w * t ** int(k))
    scale = np.linalg.norm(m)
    if scale <= 1e-300 or scale <= 1e-14 * np.abs(U.values).sum() * U.dt:
        return 0.0
    A = homogeneous_monomials(U.dirs.directions, int(k))
    coef, *_ = np.linalg.lstsq(A, m, rcond=None)
    return float(np.linalg.norm(A @ coef - m) / scale)
