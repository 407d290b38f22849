"""The Bargmann transform ``T_h`` on R^n and its hyperplane counterpart ``B_h``.

``T_h u(z) = 2^{n/4} h^{-3n/4} int exp(-pi (z-y)^2 / h) u(y) dy`` with the
bilinear square ``z^2 = z.z``.  For ``z = x - i xi`` the natural weight is
``exp(-pi |xi|^2 / h)``; the ``weighted`` variants fold it into the exponent
so that nothing overflows when ``|xi|^2 / h`` is large.
"""

from dataclasses import dataclass
from math import pi

import numpy as np

from .grids import BoxSpec, GridFunction, Sinogram, SinogramFunction, sample
from .special import bargmann_B_constant, hermite
from .transforms import fourier_h


@dataclass(frozen=True, eq=False)
class PhaseSpacePointC:
    """``z = x - i xi`` together with its real coordinates."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, float)
        xi = np.array(self.xi, float)
        if x.shape != xi.shape or x.ndim != 1:
            raise ValueError("x and xi must be vectors of equal length")
        x.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def from_z(cls, z):
        z = np.asarray(z, complex)
        return cls(z.real, -z.imag)

    @property
    def z(self):
        return self.x - 1j * self.xi

    @property
    def n(self):
        return self.x.size

    @property
    def dual(self):
        """The companion covector ``2 pi xi``."""
        return 2 * pi * self.xi


@dataclass(frozen=True)
class SemiclassicalParam:
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")


def _h(h):
    return h.h if isinstance(h, SemiclassicalParam) else SemiclassicalParam(float(h)).h


def default_box(n, h, center=None, half_width=6.0):
    """Box whose step resolves ``exp(-pi y^2 / h)`` (about 8 nodes per sqrt(h))."""
    step = min(0.1, np.sqrt(h) / 8)
    count = 2 * int(np.ceil(half_width / step)) + 1
    return BoxSpec(n, half_width, count, center)


def local_box(x, xi, h, half_width=8.0):
    """Box around ``x`` that resolves the weighted kernel at ``x - i xi``.

    The weighted kernel is a Gaussian of width ``sqrt(h)`` modulated at
    frequency ``|xi| / h``; the box spans ``half_width * sqrt(h)`` and takes
    8 nodes per oscillation and per ``sqrt(h)``.
    """
    x = np.asarray(x, float)
    r = float(np.max(np.abs(xi)))
    step = min(np.sqrt(h) / 8, h / (8 * r)) if r > 0 else np.sqrt(h) / 8
    half = half_width * np.sqrt(h)
    return BoxSpec(x.size, half, 2 * int(np.ceil(half / step)) + 1, tuple(x))


def bargmann_T(u, z, h, box=None, weighted=False):
    """``T_h u(z)`` by tensor quadrature.

    Parameters
    ----------
    u : callable or GridFunction
        Callables are sampled on ``box`` (default: ``[-6, 6]^n`` with a step
        that resolves the kernel).
    z : array_like, complex
        One point ``(n,)`` or a stack ``(..., n)``.
    h : float or SemiclassicalParam
    weighted : bool
        Return ``exp(-pi |Im z|^2 / h) T_h u(z)`` instead.

    Notes
    -----
    The Gaussian kernel factorizes over coordinates, so the quadrature is a
    sequence of one-axis contractions.
    """
    h = _h(h)
    z = np.asarray(z, complex)
    n = z.shape[-1]
    if not isinstance(u, GridFunction):
        u = sample(u, box or default_box(n, h))
    if not np.all(np.isfinite(u.values)):
        raise ValueError("non-finite integrand")
    zs = z.reshape(-1, n)
    x, xi = zs.real, -zs.imag
    vals = u.values
    for j, y in enumerate(u.axes()):
        d = x[:, j, None] - y[None, :]
        # -pi (z-y)^2/h - pi xi^2/h = -pi d^2/h + 2 pi i xi d / h
        kern = np.exp(-pi * d * d / h + 2j * pi * xi[:, j, None] * d / h) * u.spacing[j]
        if j == 0:
            vals = np.tensordot(kern, vals, axes=([1], [0]))
        else:
            vals = np.einsum("zy,zy...->z...", kern, vals)
    out = 2 ** (n / 4) * h ** (-0.75 * n) * vals
    if not weighted:
        out = out * np.exp(pi * np.sum(xi * xi, axis=1) / h)
    return out.reshape(z.shape[:-1]) if z.ndim > 1 else complex(out[0])


def phase_phi(z, omega, t):
    """``i pi (z.omega - t)^2``."""
    s = np.asarray(z, complex) @ np.asarray(omega, float) - t
    return 1j * pi * s * s


def im_phase(x, xi, omega, t):
    """``Im phi = pi (x.omega - t)^2 - pi (xi.omega)^2`` for ``z = x - i xi``."""
    omega = np.asarray(omega, float)
    return pi * (np.asarray(x, float) @ omega - t) ** 2 - pi * (np.asarray(xi, float) @ omega) ** 2


def amplitude_a(n, z, omega, t, h):
    """``H_{n-1}(sqrt(pi/h) (z.omega - t))``."""
    if int(n) != n or n < 2:
        raise ValueError(f"amplitude needs n >= 2, got {n}")
    h = _h(h)
    s = np.asarray(z, complex) @ np.asarray(omega, float) - t
    return hermite(int(n) - 1, np.sqrt(pi / h) * s)


def _check_B_input(U, n):
    sigma = U.parity.sign(n)
    if sigma != (-1) ** (n - 1):
        raise ValueError(
            f"B_h integrates functions with U(-w,-t) = (-1)^(n-1) U(w,t); got parity {U.parity.value} for n={n}")


def bargmann_B(U, z, h, dirs=None, nodes=128, weighted=False):
    """Hyperplane Bargmann transform ``B_h U(z)``.

    ``A h^{-3n/4} iint_{P^n} exp(-pi (z.w - t)^2 / h) H_{n-1}(sqrt(pi/h)(z.w - t)) U dw dt``,
    realized as half the integral over ``S^{n-1} x R``.

    Parameters
    ----------
    U : Sinogram or SinogramFunction
        Sampled data use the trapezoid rule in t on the stored grid.  An
        analytic ``SinogramFunction`` is integrated along the shifted line
        ``t = z.w + s`` (``s`` real) with ``nodes`` Gauss-Hermite points;
        this avoids the ``exp(pi (xi.w)^2 / h)`` cancellation of the real
        contour.  ``dirs`` then supplies the direction quadrature.
    z : array_like, complex
        One point ``(n,)`` or a stack ``(..., n)``.
    weighted : bool
        Multiply by ``exp(-pi |Im z|^2 / h)``.
    """
    if not isinstance(U, (Sinogram, SinogramFunction)):
        raise TypeError("U must be a Sinogram or a SinogramFunction")
    h = _h(h)
    z = np.asarray(z, complex)
    n = z.shape[-1]
    if U.n != n:
        raise ValueError(f"sinogram dimension {U.n} != len(z) = {n}")
    _check_B_input(U, n)
    const = bargmann_B_constant(n) * h ** (-0.75 * n)
    zs = z.reshape(-1, n)
    out = np.empty(len(zs), complex)
    if isinstance(U, Sinogram):
        om, w = U.dirs.directions, U.dirs.weights
        t = U.t
        vals = U.values
        for i, zz in enumerate(zs):
            s = (zz @ om.T)[:, None] - t[None, :]
            expo = -pi * s * s / h
            if weighted:
                expo = expo - pi * np.sum(zz.imag ** 2) / h
            integrand = np.exp(expo) * hermite(n - 1, np.sqrt(pi / h) * s) * vals
            out[i] = 0.5 * U.dt * (w @ integrand.sum(axis=1))
    else:
        if dirs is None:
            raise ValueError("a SinogramFunction needs a direction grid")
        om, w = dirs.directions, dirs.weights
        y, gw = np.polynomial.hermite.hermgauss(nodes)
        scale = np.sqrt(h / pi)
        sn = scale * y
        for i, zz in enumerate(zs):
            zw = zz @ om.T
            tt = zw[:, None] + sn[None, :]
            vals = np.asarray(U(om, tt), complex)
            # z.w - t = -s on this contour; exp(-pi s^2/h) is the Hermite weight
            integrand = hermite(n - 1, -y)[None, :] * vals
            res = 0.5 * scale * (w @ (integrand @ gw))
            if weighted:
                res = res * np.exp(-pi * np.sum(zz.imag ** 2) / h)
            out[i] = res
    out = const * out
    return out.reshape(z.shape[:-1]) if z.ndim > 1 else complex(out[0])


def bargmann_B_integrand(U, z, h):
    """Integrand of ``B_h`` on the sinogram grid (for parity diagnostics)."""
    h = _h(h)
    z = np.asarray(z, complex)
    s = (z @ U.dirs.directions.T)[:, None] - U.t[None, :]
    return np.exp(-pi * s * s / h) * hermite(U.n - 1, np.sqrt(pi / h) * s) * U.values


@dataclass(frozen=True)
class CoherentState:
    """``psi(y; x, xi, h) = 2^{n/4} h^{-n/4} exp(-2 pi i (x-y).xi / h - pi (x-y)^2 / h)``."""

    center: PhaseSpacePointC
    h: SemiclassicalParam

    def __post_init__(self):
        if not isinstance(self.h, SemiclassicalParam):
            object.__setattr__(self, "h", SemiclassicalParam(float(self.h)))

    def __call__(self, y):
        return coherent_state_value(self, y)


def coherent_state_value(cs, y):
    """Evaluate the coherent state at points ``y`` of shape ``(..., n)``."""
    h = cs.h.h
    x, xi = cs.center.x, cs.center.xi
    d = x - np.asarray(y, float)
    n = x.size
    return 2 ** (n / 4) * h ** (-n / 4) * np.exp(-2j * pi * (d @ xi) / h - pi * np.sum(d * d, axis=-1) / h)


@dataclass(frozen=True)
class Stats:
    norm: float
    mean_pos: np.ndarray
    mean_freq: np.ndarray
    var_pos: float
    var_freq: float

    @property
    def product(self):
        """``sigma(u, x) * sigma(F_h u, xi)``."""
        return float(np.sqrt(self.var_pos * self.var_freq))


def spread_stats(u, h, freq_center=None):
    """Norm, means and ``sigma^2`` spreads of a GridFunction and its h-Fourier transform.

    ``sigma(u, X)^2 = int |2 pi (y - X) u|^2 dy`` with ``X`` the mean, and the
    same on the frequency side.  ``u`` is used as given (no normalization).
    """
    h = _h(h)
    dens = np.abs(u.values) ** 2
    norm2 = float(np.sum(dens) * u.cell_volume)
    pts = u.points()
    mean_pos = np.tensordot(dens, pts, axes=(tuple(range(u.n)), tuple(range(u.n)))) * u.cell_volume / norm2
    var_pos = 4 * pi ** 2 * float(np.sum(dens * np.sum((pts - mean_pos) ** 2, axis=-1)) * u.cell_volume) / norm2

    probe = fourier_h(u, h)
    eta_step = probe.spacing
    if freq_center is None:
        fd = np.abs(probe.values) ** 2
        freq_center = np.tensordot(fd, probe.points(), axes=(tuple(range(u.n)), tuple(range(u.n)))) / fd.sum()
    origin = np.asarray(freq_center, float) - np.array([s // 2 for s in u.shape]) * eta_step
    F = fourier_h(u, h, dual_origin=origin)
    fd = np.abs(F.values) ** 2
    fnorm2 = float(np.sum(fd) * F.cell_volume)
    fpts = F.points()
    mean_freq = np.tensordot(fd, fpts, axes=(tuple(range(u.n)), tuple(range(u.n)))) * F.cell_volume / fnorm2
    var_freq = 4 * pi ** 2 * float(np.sum(fd * np.sum((fpts - mean_freq) ** 2, axis=-1)) * F.cell_volume) / fnorm2
    return Stats(np.sqrt(norm2), mean_pos, mean_freq, var_pos, var_freq)


def coherent_stats(cs, box=None):
    """Quadrature statistics of a coherent state; ``box`` defaults to one centred at ``x``."""
    h = cs.h.h
    n = cs.center.n
    if box is None:
        # trapezoid on a Gaussian: 8 points per sqrt(h) is already at rounding level
        step = np.sqrt(h) / 8
        half = 8 * np.sqrt(h)
        box = BoxSpec(n, half, 2 * int(np.ceil(half / step)) + 1, tuple(cs.center.x))
    u = sample(lambda y: coherent_state_value(cs, y), box)
    return spread_stats(u, h, freq_center=cs.center.xi)


def husimi_weight(u, x, xi, h, box=None):
    """``exp(-pi |xi|^2 / h) T_h u(x - i xi)`` through the weighted kernel.

    Callables are sampled on ``box``, by default :func:`local_box`.
    """
    h = _h(h)
    z = np.asarray(x, float) - 1j * np.asarray(xi, float)
    if not isinstance(u, GridFunction) and box is None:
        box = local_box(x, xi, h)
    return bargmann_T(u, z, h, box=box, weighted=True)


def husimi_inner(u, x, xi, h, box=None):
    """``h^{-n/2} <u, psi(.; x, xi, h)>`` by direct quadrature (second route to the weight)."""
    h = _h(h)
    x = np.asarray(x, float)
    n = x.size
    if not isinstance(u, GridFunction):
        u = sample(u, box or default_box(n, h))
    cs = CoherentState(PhaseSpacePointC(x, xi), SemiclassicalParam(h))
    psi = coherent_state_value(cs, u.points())
    return h ** (-n / 2) * u.integrate(np.conj(psi))


@dataclass(frozen=True)
class HeisenbergResult:
    product: float
    bound: float
    ok: bool


def heisenberg_check(u, h, box=None, rtol=1e-6):
    """Check ``sigma(u, x) sigma(F_h u, xi) >= n pi h`` after normalizing ``u``."""
    h = _h(h)
    if not isinstance(u, GridFunction):
        u = sample(u, box)
    nrm = np.sqrt(np.sum(np.abs(u.values) ** 2) * u.cell_volume)
    st = spread_stats(u.with_values(u.values / nrm), h)
    bound = u.n * pi * h
    return HeisenbergResult(st.product, bound, bool(st.product >= bound * (1 - rtol)))


def cauchy_riemann_residual(f, z, delta=1e-4):
    """``max_j |d f / d conj(z_j)|`` by central differences; ``f`` maps ``(n,)`` complex to complex."""
    z = np.asarray(z, complex)
    res = 0.0
    for j in range(z.size):
        e = np.zeros(z.size)
        e[j] = delta
        dx = (f(z + e) - f(z - e)) / (2 * delta)
        dy = (f(z + 1j * e) - f(z - 1j * e)) / (2 * delta)
        res = max(res, abs(0.5 * (dx + 1j * dy)))
    return res

