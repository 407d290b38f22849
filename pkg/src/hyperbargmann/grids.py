"""Discretizations of R^n, the sphere and the space of hyperplanes.

Everything here is immutable after construction and safe to share between
threads.  Arrays are stored read-only.
"""

from dataclasses import dataclass
from enum import Enum
from math import pi

import numpy as np


class Parity(str, Enum):
    """Symmetry class of a function on ``S^{n-1} x R``.

    ``EVEN_P`` means ``U(-w,-t) = U(w,t)`` (a function on the space of
    hyperplanes).  ``SIGNED_PTILDE`` means ``U(-w,-t) = (-1)^{n-1} U(w,t)``.
    For odd ``n`` the two coincide.  ``ODD`` (``U(-w,-t) = -U(w,t)``) covers
    the Hilbert transform of an even function when ``n`` is odd.
    """

    EVEN_P = "even_P"
    SIGNED_PTILDE = "signed_Ptilde"
    ODD = "odd"

    def sign(self, n):
        if self is Parity.EVEN_P:
            return 1
        if self is Parity.ODD:
            return -1
        return -1 if n % 2 == 0 else 1

    @classmethod
    def from_sign(cls, sign, n):
        if sign > 0:
            return cls.EVEN_P
        return cls.SIGNED_PTILDE if n % 2 == 0 else cls.ODD


def _frozen(a, dtype=None):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BoxSpec:
    """Uniform cube ``[-half_width, half_width]^n`` with ``count`` nodes per axis."""

    n: int
    half_width: float = 6.0
    count: int = 121
    center: tuple = None

    def __post_init__(self):
        if self.half_width <= 0 or self.count < 2:
            raise ValueError("box needs positive half_width and count >= 2")

    @property
    def origin(self):
        c = np.zeros(self.n) if self.center is None else np.asarray(self.center, float)
        return c - self.half_width

    @property
    def spacing(self):
        return np.full(self.n, 2 * self.half_width / (self.count - 1))

    @property
    def shape(self):
        return (self.count,) * self.n


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on a uniform box grid (row-major ``values``)."""

    n: int
    origin: np.ndarray
    spacing: np.ndarray
    shape: tuple
    values: np.ndarray

    def __post_init__(self):
        spacing = np.asarray(self.spacing, float)
        if spacing.shape != (self.n,) or np.any(spacing <= 0):
            raise ValueError("spacing must be positive on each axis")
        values = np.asarray(self.values, dtype=complex).reshape(self.shape)
        object.__setattr__(self, "origin", _frozen(self.origin, float))
        object.__setattr__(self, "spacing", _frozen(spacing))
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def on(cls, box, values):
        return cls(box.n, box.origin, box.spacing, box.shape, values)

    def axes(self):
        return [self.origin[j] + self.spacing[j] * np.arange(self.shape[j]) for j in range(self.n)]

    def points(self):
        """Node coordinates, shape ``shape + (n,)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def integrate(self, weight=None):
        """Riemann sum over the box (the trapezoid rule when values vanish at the edge)."""
        v = self.values if weight is None else self.values * weight
        return complex(np.sum(v) * self.cell_volume)

    def with_values(self, values):
        return GridFunction(self.n, self.origin, self.spacing, self.shape, values)


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    """Quadrature on ``S^{n-1}`` closed under ``w -> -w``."""

    n: int
    directions: np.ndarray
    weights: np.ndarray
    antipode_index: np.ndarray
    degree: int = 0

    def __post_init__(self):
        for name, dtype in (("directions", float), ("weights", float), ("antipode_index", int)):
            object.__setattr__(self, name, _frozen(getattr(self, name), dtype))

    def __len__(self):
        return len(self.weights)


def make_direction_grid(n, resolution):
    """Antipodally symmetric product quadrature on the circle or the 2-sphere.

    For ``n = 2``: ``resolution`` equispaced angles with equal weights.
    For ``n = 3``: ``resolution`` equispaced azimuths times
    ``resolution // 2`` Gauss-Legendre nodes in the cosine of the polar angle.
    Both rules integrate trigonometric / spherical-harmonic content of degree
    below ``resolution`` exactly.
    """
    if n not in (2, 3):
        raise ValueError(f"direction grids exist for n in (2, 3), got {n}")
    if resolution < 2 or resolution % 2:
        raise ValueError("resolution must be a positive even integer")
    m = resolution
    phi = 2 * pi * np.arange(m) / m
    azi_anti = (np.arange(m) + m // 2) % m
    if n == 2:
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return DirectionGrid(2, dirs, np.full(m, 2 * pi / m), azi_anti, degree=m - 1)

    p = m // 2
    x, w = np.polynomial.legendre.leggauss(p)
    sin_t = np.sqrt(1 - x * x)
    dirs = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.repeat(x, m),
        ],
        axis=1,
    )
    weights = np.outer(w, np.full(m, 2 * pi / m)).ravel()
    # leggauss nodes are symmetric: node i pairs with node p-1-i
    pol_anti = p - 1 - np.arange(p)
    anti = (pol_anti[:, None] * m + azi_anti[None, :]).ravel()
    return DirectionGrid(3, dirs, weights, anti, degree=m - 1)


@dataclass(frozen=True, eq=False)
class Sinogram:
    """Samples ``U(w_i, t_j)`` on a direction grid times a uniform t axis."""

    dirs: DirectionGrid
    t_min: float
    t_max: float
    t_count: int
    values: np.ndarray
    parity: Parity = Parity.EVEN_P

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.dirs), self.t_count):
            raise ValueError(f"values shape {values.shape} != ({len(self.dirs)}, {self.t_count})")
        if not self.t_max > self.t_min:
            raise ValueError("t_max must exceed t_min")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "parity", Parity(self.parity))

    @property
    def n(self):
        return self.dirs.n

    @property
    def t(self):
        return np.linspace(self.t_min, self.t_max, self.t_count)

    @property
    def dt(self):
        return (self.t_max - self.t_min) / (self.t_count - 1)

    @property
    def symmetric(self):
        return abs(self.t_min + self.t_max) <= 1e-12 * max(1.0, abs(self.t_max))

    def with_values(self, values, parity=None):
        return Sinogram(self.dirs, self.t_min, self.t_max, self.t_count, values,
                        self.parity if parity is None else parity)


@dataclass(frozen=True)
class SinogramFunction:
    """A function on ``S^{n-1} x R`` that can be evaluated at complex ``t``.

    ``func(omega, t)`` receives directions of shape ``(M, n)`` and offsets of
    shape ``(M, K)`` (possibly complex) and returns ``(M, K)`` values.  Used
    where the t-integral is moved off the real axis.
    """

    n: int
    func: object
    parity: Parity = Parity.EVEN_P

    def __call__(self, omega, t):
        return self.func(omega, t)


@dataclass(frozen=True, eq=False)
class CotangentPointP:
    """Point ``(w, t, eta, tau)`` of the cotangent bundle of the hyperplane space.

    ``eta`` and ``tau`` are the covector components (``eta`` orthogonal to ``w``).
    """

    omega: np.ndarray
    t: float
    eta: np.ndarray
    tau: float

    def __post_init__(self):
        omega = np.asarray(self.omega, float)
        eta = np.asarray(self.eta, float)
        if abs(np.linalg.norm(omega) - 1) > 1e-12:
            raise ValueError(f"omega must be a unit vector, |omega| = {np.linalg.norm(omega)}")
        if abs(eta @ omega) > 1e-10 * max(1.0, np.linalg.norm(eta)):
            raise ValueError(f"eta must be orthogonal to omega, eta.omega = {eta @ omega}")
        object.__setattr__(self, "omega", _frozen(omega))
        object.__setattr__(self, "eta", _frozen(eta))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "tau", float(self.tau))

    @classmethod
    def from_fiber(cls, omega, t, eta, tau):
        """Build from the parametrization ``(w, t, 2 pi tau eta, 2 pi tau)``."""
        eta = np.asarray(eta, float)
        return cls(omega, t, 2 * pi * tau * eta, 2 * pi * tau)

    def antipode(self):
        return CotangentPointP(-self.omega, -self.t, -self.eta, -self.tau)

    def canonical(self):
        return self if canonical_sign(self.omega, self.t) > 0 else self.antipode()

    def allclose(self, other, atol=1e-10):
        return (np.allclose(self.omega, other.omega, atol=atol) and abs(self.t - other.t) <= atol
                and np.allclose(self.eta, other.eta, atol=atol) and abs(self.tau - other.tau) <= atol)


def canonical_sign(omega, t=0.0, tol=1e-12):
    """+1 if ``(omega, t)`` is the canonical representative of its hyperplane, else -1.

    Canonical: first component of ``omega`` with ``|w_j| > tol`` positive;
    ``t > 0`` breaks the (degenerate) tie.
    """
    for w in np.asarray(omega, float):
        if abs(w) > tol:
            return 1 if w > 0 else -1
    return 1 if t >= 0 else -1


def parity_defect(U):
    """``max |U(-w,-t) - sigma U(w,t)|`` over the grid; zero for exact parity."""
    if not U.symmetric:
        raise ValueError("parity check needs a t grid symmetric about 0")
    sigma = U.parity.sign(U.n)
    flipped = U.values[U.dirs.antipode_index][:, ::-1]
    return float(np.max(np.abs(flipped - sigma * U.values), initial=0.0))


def sample(f, box):
    """Evaluate ``f(points)`` on ``box``; ``points`` has shape ``box.shape + (n,)``."""
    proto = GridFunction.on(box, np.zeros(box.shape))
    vals = np.broadcast_to(np.asarray(f(proto.points()), dtype=complex), box.shape)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite sample values")
    return proto.with_values(vals)


def t_axis(half_width=8.0, count=801):
    """Symmetric t grid ``[-T, T]``; default T = 8 covers unit-scale Gaussians."""
    return -half_width, half_width, count


def sample_sino(F, dirs, t_spec=None, parity=Parity.EVEN_P):
    """Evaluate ``F(omega, t)`` (shapes ``(M, n)``, ``(M, K)``) into a Sinogram."""
    t_min, t_max, t_count = t_axis() if t_spec is None else t_spec
    t = np.linspace(t_min, t_max, t_count)
    om = dirs.directions
    vals = np.asarray(F(om, np.broadcast_to(t, (len(om), t_count))), dtype=complex)
    vals = np.broadcast_to(vals, (len(om), t_count))
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite sinogram samples")
    return Sinogram(dirs, t_min, t_max, t_count, vals, parity)
