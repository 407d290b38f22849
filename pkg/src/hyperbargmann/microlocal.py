"""Canonical transforms, critical points of the phase and decay-based wave-front tests."""

from dataclasses import dataclass
from enum import Enum
from math import asin, cos, pi

import numpy as np

from .bargmann import bargmann_B, bargmann_T, im_phase
from .grids import CotangentPointP, GridFunction, Sinogram, SinogramFunction, canonical_sign


@dataclass(frozen=True, eq=False)
class LambdaPhiPoint:
    """Point ``(z, zeta)`` of ``Lambda_Phi = {(x - i xi, 2 pi xi)}``."""

    z: np.ndarray
    zeta_dual: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, complex)
        zeta = np.array(self.zeta_dual, complex)
        scale = max(1.0, float(np.max(np.abs(zeta), initial=0.0)))
        if np.max(np.abs(zeta - 2 * pi * (-z.imag)), initial=0.0) > 1e-10 * scale:
            raise ValueError("zeta_dual must equal -2 pi Im z on Lambda_Phi")
        z.setflags(write=False)
        zeta.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "zeta_dual", zeta)

    @property
    def x(self):
        return self.z.real

    @property
    def xi(self):
        return -self.z.imag

    def allclose(self, other, atol=1e-10):
        return np.allclose(self.z, other.z, atol=atol) and np.allclose(self.zeta_dual, other.zeta_dual, atol=atol)


def kappa_B(p):
    """``kappa_B(w, t, 2 pi tau eta, 2 pi tau) = (t w - eta - i tau w, 2 pi tau w)``.

    ``p`` carries covector components; the fiber parameters are recovered as
    ``tau' = tau / 2 pi`` and ``eta' = eta / tau``.  The zero section maps to
    ``(t w, 0)``; a point with ``tau = 0`` but ``eta != 0`` has no preimage
    parametrization and is rejected.
    """
    if not isinstance(p, CotangentPointP):
        raise TypeError("kappa_B expects a CotangentPointP")
    om = p.omega
    if p.tau == 0:
        if np.any(p.eta != 0):
            raise ValueError("tau = 0 with eta != 0 is outside the fiber parametrization")
        return LambdaPhiPoint(p.t * om + 0j, np.zeros(om.size))
    tau_f = p.tau / (2 * pi)
    eta_f = p.eta / p.tau
    return LambdaPhiPoint(p.t * om - eta_f - 1j * tau_f * om, p.tau * om)


def kappa_B_inv(x, xi):
    """Both preimages ``+-(xi/|xi|, x.xi/|xi|, 2 pi |xi| (-x + (x.xi) xi/|xi|^2), 2 pi |xi|)``.

    The canonical representative (first nonzero ``omega`` component
    positive) comes first.
    """
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    r = np.linalg.norm(xi)
    if r == 0:
        raise ValueError("xi = 0 has no hyperplane direction")
    om = xi / r
    t = x @ om
    eta = 2 * pi * r * (-x + t * om)
    # exact orthogonality so CotangentPointP accepts it
    eta = eta - (eta @ om) * om
    p = CotangentPointP(om, t, eta, 2 * pi * r)
    q = p.antipode()
    return (p, q) if canonical_sign(om, t) > 0 else (q, p)


def kappa_T(x, xi):
    """``K_T(x, 2 pi xi) = (x - i xi, 2 pi xi)``."""
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    return LambdaPhiPoint(x - 1j * xi, 2 * pi * xi)


def wavefront_map(detections):
    """Push sinogram-side detections through ``kappa_B`` and return ``(x, xi)`` pairs."""
    out = []
    for p in detections:
        if p.tau == 0:
            raise ValueError("detection with tau = 0 carries no object frequency")
        q = kappa_B(p)
        out.append((q.x, q.xi))
    return out


# --- phase analysis in a chart of the sphere --------------------------------

def chart_permutation(omega):
    """Permutation putting the largest ``|omega_j|`` last (ties: the later index)."""
    omega = np.asarray(omega, float)
    j = int(np.argmax(np.abs(omega[::-1])))
    last = omega.size - 1 - j
    return np.array([i for i in range(omega.size) if i != last] + [last])


class _Chart:
    """``zeta = (omega', t)`` with ``omega_n = sign * sqrt(1 - |omega'|^2)`` after permuting axes."""

    def __init__(self, omega):
        omega = np.asarray(omega, float)
        self.perm = chart_permutation(omega)
        self.sign = 1.0 if omega[self.perm[-1]] >= 0 else -1.0
        self.n = omega.size

    def omega(self, wp):
        om = np.empty(self.n)
        om[self.perm[:-1]] = wp
        om[self.perm[-1]] = self.sign * np.sqrt(1 - wp @ wp)
        return om

    def coords(self, omega, t):
        return np.append(np.asarray(omega, float)[self.perm[:-1]], t)

    def unpack(self, zeta):
        return self.omega(zeta[:-1]), zeta[-1]


def _fd_grad(f, p, step):
    def d(s):
        g = np.empty(p.size)
        for k in range(p.size):
            e = np.zeros(p.size)
            e[k] = s
            g[k] = (f(p + e) - f(p - e)) / (2 * s)
        return g
    return (4 * d(step / 2) - d(step)) / 3


def _fd_jac(f, p, step):
    """Jacobian of a vector-valued ``f`` (columns = coordinates), Richardson once."""
    def d(s):
        cols = []
        for k in range(p.size):
            e = np.zeros(p.size)
            e[k] = s
            cols.append((f(p + e) - f(p - e)) / (2 * s))
        return np.stack(cols, axis=1)
    return (4 * d(step / 2) - d(step)) / 3


def _fd_hess(f, p, step):
    def d(s):
        m = p.size
        H = np.empty((m, m))
        f0 = f(p)
        for a in range(m):
            ea = np.zeros(m)
            ea[a] = s
            H[a, a] = (f(p + ea) - 2 * f0 + f(p - ea)) / (s * s)
            for b in range(a):
                eb = np.zeros(m)
                eb[b] = s
                H[a, b] = H[b, a] = (f(p + ea + eb) - f(p + ea - eb) - f(p - ea + eb) + f(p - ea - eb)) / (4 * s * s)
        return H
    return (4 * d(step) - d(2 * step)) / 3


@dataclass(frozen=True)
class CriticalPoints:
    omega: np.ndarray
    t: float
    grad_norm: float
    degenerate_set: str
    degenerate_example: tuple


def _xi_check(xi):
    xi = np.asarray(xi, float)
    if not np.linalg.norm(xi) > 0:
        raise ValueError("xi must be nonzero")
    return xi


def phase_gradient(x, xi, omega, t, step=1e-4):
    """Gradient of ``Im phi`` in chart coordinates ``(omega', t)`` at ``(omega, t)``."""
    ch = _Chart(omega)
    f = lambda zeta: im_phase(x, xi, *ch.unpack(zeta))
    return _fd_grad(f, ch.coords(omega, t), step)


def phase_hessian(x, xi, omega, t, step=1e-4):
    """Hessian of ``Im phi`` in chart coordinates at ``(omega, t)``."""
    ch = _Chart(omega)
    f = lambda zeta: im_phase(x, xi, *ch.unpack(zeta))
    return _fd_hess(f, ch.coords(omega, t), step)


def degenerate_point(x, xi):
    """A representative ``(omega, t)`` with ``xi.omega = 0`` and ``t = x.omega``."""
    x = np.asarray(x, float)
    xi = _xi_check(xi)
    n = xi.size
    j = int(np.argmin(np.abs(xi)))
    e = np.zeros(n)
    e[j] = 1.0
    v = e - (e @ xi) / (xi @ xi) * xi
    om = v / np.linalg.norm(v)
    return om, float(x @ om)


def critical_points(x, xi, tol=1e-8):
    """Nondegenerate critical point of ``Im phi`` and a description of the degenerate set."""
    x = np.asarray(x, float)
    xi = _xi_check(xi)
    om = xi / np.linalg.norm(xi)
    if canonical_sign(om, x @ om) < 0:
        om = -om
    t = float(x @ om)
    g = float(np.linalg.norm(phase_gradient(x, xi, om, t)))
    if g > tol:
        raise ArithmeticError(f"gradient {g:.3e} at the predicted critical point exceeds {tol}")
    return CriticalPoints(om, t, g, "{(omega, t): xi.omega = 0, t = x.omega}", degenerate_point(x, xi))


@dataclass(frozen=True)
class HessianReport:
    eigen_min: float
    eigenvalues: np.ndarray
    det_zzeta: complex
    det_closed_form: complex
    det_rel_err: float
    degenerate_eigen_absmin: float
    degenerate_eigen_min: float


def mixed_det(x, xi, omega, t, step=1e-4):
    """``det phi''_{z zeta}`` in the permuted chart at ``(omega, t)``.

    ``d phi / d z = 2 pi i (z.w - t) w`` is exact; its ``zeta`` derivatives
    are taken by central differences.
    """
    ch = _Chart(omega)
    z = np.asarray(x, float) - 1j * np.asarray(xi, float)
    zp = z[ch.perm]

    def dphi_dz(zeta):
        om, tt = ch.unpack(zeta)
        om = om[ch.perm]
        return 2j * pi * (zp @ om - tt) * om

    def jac(s):
        p = ch.coords(omega, t)
        cols = []
        for k in range(p.size):
            e = np.zeros(p.size)
            e[k] = s
            cols.append((dphi_dz(p + e) - dphi_dz(p - e)) / (2 * s))
        return np.stack(cols, axis=1)

    J = (4 * jac(step / 2) - jac(step)) / 3
    return complex(np.linalg.det(J))


def mixed_det_closed_form(xi, omega):
    """``(2 pi)^n (xi_n/w_n)^{n-1} (-i w_n) det(E + w' w'^T / w_n^2)`` in the permuted chart."""
    ch = _Chart(omega)
    xi_p = np.asarray(xi, float)[ch.perm]
    om_p = np.asarray(omega, float)[ch.perm]
    n = om_p.size
    wp, wn = om_p[:-1], om_p[-1]
    E = np.eye(n - 1) + np.outer(wp, wp) / wn ** 2
    return complex((2 * pi) ** n * (xi_p[-1] / wn) ** (n - 1) * (-1j * wn) * np.linalg.det(E))


def hessian_check(x, xi):
    """Second-order structure of the phase at the critical points of ``(x, xi)``."""
    cp = critical_points(x, xi)
    H = phase_hessian(x, xi, cp.omega, cp.t)
    ev = np.linalg.eigvalsh(H)
    det = mixed_det(x, xi, cp.omega, cp.t)
    closed = mixed_det_closed_form(xi, cp.omega)
    dom, dt = cp.degenerate_example
    dev = np.linalg.eigvalsh(phase_hessian(x, xi, dom, dt))
    return HessianReport(float(ev[0]), ev, det, closed, abs(det - closed) / abs(closed),
                         float(np.min(np.abs(dev))), float(dev[0]))


# --- decay scans -------------------------------------------------------------

class DecayClass(str, Enum):
    EXPONENTIAL = "exponential_decay"
    RAPID = "rapid_decay"
    SLOW = "slow"


UNDERFLOW = 1e-300


@dataclass(frozen=True)
class DecayProfile:
    point: tuple
    samples: tuple
    fitted_rate: float
    log_h_slope: float
    classification: DecayClass
    clamped: bool = False

    def __post_init__(self):
        hs = [h for h, _ in self.samples]
        if any(b >= a for a, b in zip(hs, hs[1:])):
            raise ValueError("h values must be strictly decreasing")
        if any(m < 0 for _, m in self.samples):
            raise ValueError("magnitudes must be non-negative")


def _slope(u, v):
    return float(np.polyfit(u, v, 1)[0])


def classify(h_list, mags, eps0=0.01, N0=3.0):
    """Fit ``log m`` against ``1/h`` and ``log h``; return ``(slope_inv_h, slope_log_h, class, clamped)``."""
    h = np.asarray(h_list, float)
    m = np.asarray(mags, float)
    clamped = bool(np.any(m < UNDERFLOW))
    logm = np.log(np.maximum(m, UNDERFLOW))
    s1 = _slope(1 / h, logm)
    s2 = _slope(np.log(h), logm)
    if s1 <= -eps0:
        cls = DecayClass.EXPONENTIAL
    elif s2 >= N0:
        cls = DecayClass.RAPID
    else:
        cls = DecayClass.SLOW
    return s1, s2, cls, clamped


def weighted_magnitude(source, x, xi, h, dirs=None, box=None):
    """``exp(-pi |xi|^2 / h) |T_h u|`` or ``|B_h U|`` at ``z = x - i xi``."""
    z = np.asarray(x, float) - 1j * np.asarray(xi, float)
    if isinstance(source, (Sinogram, SinogramFunction)):
        return abs(bargmann_B(source, z, h, dirs=dirs, weighted=True))
    if isinstance(source, GridFunction):
        return abs(bargmann_T(source, z, h, weighted=True))
    if callable(source):
        return abs(source(x, xi, h))
    raise TypeError("source must be a GridFunction, a Sinogram or a callable (x, xi, h)")


def decay_scan(source, x, xi, h_list, eps0=0.01, N0=3.0, dirs=None, pool=None):
    """Weighted magnitude at ``x - i xi`` for each ``h`` and its decay class.

    Parameters
    ----------
    source : GridFunction, Sinogram, SinogramFunction or callable
        Object-side data go through ``T_h``, sinogram-side data through
        ``B_h``.  A callable ``f(x, xi, h)`` returns the weighted transform.
    h_list : sequence of float
        Strictly decreasing, at least four values.
    eps0, N0 : float
        Thresholds on the slope against ``1/h`` and against ``log h``.
    """
    h_list = [float(h) for h in h_list]
    if len(h_list) < 4:
        raise ValueError("decay fit needs at least four h values")
    _xi_check(xi)
    job = lambda h: weighted_magnitude(source, x, xi, h, dirs=dirs)
    mags = list(pool.map(job, h_list)) if pool is not None else [job(h) for h in h_list]
    s1, s2, cls, clamped = classify(h_list, mags, eps0, N0)
    pt = (tuple(np.asarray(x, float)), tuple(np.asarray(xi, float)))
    return DecayProfile(pt, tuple(zip(h_list, mags)), s1, s2, cls, clamped)


# --- degenerate-point cutoff -------------------------------------------------

def smoothstep(u):
    """``C^2`` ramp: 0 for ``u <= 0``, 1 for ``u >= 1``."""
    u = np.clip(u, 0.0, 1.0)
    return u ** 3 * (10 - 15 * u + 6 * u * u)


@dataclass(frozen=True)
class CutoffSpec:
    """Neighbourhood ``B_rho(x0) x B_rho(xi0)`` and the t-cutoff levels ``T0 < T1``.

    ``T0 = |x0| + rho`` bounds ``|x.w|`` on the ball; ``T1 = T0 + 1``.
    """

    x0: tuple
    xi0: tuple
    rho: float = None
    T0: float = None
    T1: float = None

    def __post_init__(self):
        xi0 = np.asarray(self.xi0, float)
        x0 = np.asarray(self.x0, float)
        r = float(np.linalg.norm(xi0))
        if r == 0:
            raise ValueError("xi0 must be nonzero")
        rho = 0.2 * r if self.rho is None else float(self.rho)
        rho = min(rho, 1.0) if self.rho is None else rho
        if not 0 < rho <= min(r / 2, 1.0):
            raise ValueError(f"rho must lie in (0, min(|xi0|/2, 1)], got {rho}")
        if self.s0(rho, r) >= self.s1(rho, r):
            raise ValueError("rho too large: the cone C_rho does not contain S_rho^perp with room for a ramp")
        T0 = float(np.linalg.norm(x0)) + rho if self.T0 is None else float(self.T0)
        T1 = T0 + 1.0 if self.T1 is None else float(self.T1)
        if not 0 < T0 < T1:
            raise ValueError("need 0 < T0 < T1")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "T0", T0)
        object.__setattr__(self, "T1", T1)

    @staticmethod
    def s0(rho, r):
        """``|nu0.w| <= s0`` describes ``S_rho^perp``."""
        return rho / r

    @staticmethod
    def s1(rho, r):
        """``|nu0.w| < s1`` describes ``C_rho``."""
        return cos(pi / 3 + asin(rho / r))

    def chi(self, omega, t):
        """``chi1(w) chi2(t)``; ``omega`` is ``(M, n)``, ``t`` broadcasts against ``(M, 1)``."""
        xi0 = np.asarray(self.xi0, float)
        r = np.linalg.norm(xi0)
        c = np.abs(np.asarray(omega, float) @ (xi0 / r))
        a, b = self.s0(self.rho, r), self.s1(self.rho, r)
        chi1 = 1 - smoothstep((c - a) / (b - a))
        chi2 = 1 - smoothstep((np.abs(t) - self.T0) / (self.T1 - self.T0))
        return chi1[:, None] * chi2

    def probe_points(self, frac=0.9):
        """Centre plus ``+-frac*rho`` along each axis, for both ``x`` and ``xi``."""
        x0 = np.asarray(self.x0, float)
        xi0 = np.asarray(self.xi0, float)
        n = x0.size
        offs = [np.zeros(n)] + [s * frac * self.rho * e for e in np.eye(n) for s in (1, -1)]
        return [(x0 + a, xi0 + b) for a in offs for b in offs]


@dataclass(frozen=True)
class CutoffResult:
    h_list: tuple
    sup_magnitudes: tuple
    measured_rate: float
    bound_rate: float
    ok: bool


def degenerate_cutoff_experiment(U, spec, h_list, pool=None):
    """Decay rate of ``sup exp(-pi xi^2/h) |B_h(chi U)(x - i xi)|`` over the probe points.

    The rate is minus the slope of ``log sup`` against ``1/h``; it passes when
    it reaches 90% of ``pi |xi0|^2 / 8``.
    """
    h_list = [float(h) for h in h_list]
    if len(h_list) < 4:
        raise ValueError("rate fit needs at least four h values")
    chiU = U.with_values(U.values * spec.chi(U.dirs.directions, U.t[None, :]))
    pts = spec.probe_points()
    zs = np.array([x - 1j * xi for x, xi in pts])
    job = lambda h: float(np.max(np.abs(bargmann_B(chiU, zs, h, weighted=True))))
    sups = list(pool.map(job, h_list)) if pool is not None else [job(h) for h in h_list]
    bound = pi * float(np.sum(np.asarray(spec.xi0, float) ** 2)) / 8
    if max(sups) == 0:
        return CutoffResult(tuple(h_list), tuple(sups), float("inf"), bound, True)
    logm = np.log(np.maximum(sups, UNDERFLOW))
    rate = -_slope(1 / np.asarray(h_list), logm)
    return CutoffResult(tuple(h_list), tuple(sups), rate, bound, bool(rate >= 0.9 * bound))
