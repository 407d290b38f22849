"""Test objects with closed-form Radon data.

A phantom is a sum of components ``weight * f((y - center) / scale)`` where
``f`` is a unit Gaussian ``exp(-pi |y|^2)`` or the indicator of the unit
ball.  For each we know ``R u``, ``H R u`` (where needed) and, for Gaussians,
``T_h u``.
"""

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np
from scipy.special import dawsn

from .grids import Parity, SinogramFunction, sample_sino
from .special import scaled_gaussian_bargmann

KINDS = ("gaussian", "shifted_gaussian", "ball_indicator")


@dataclass(frozen=True)
class Component:
    kind: str
    center: tuple = None
    scale: float = 1.0
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}; expected one of {KINDS}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not np.isfinite(self.weight):
            raise ValueError("weight must be finite")

    def c(self, n):
        return np.zeros(n) if self.center is None else np.asarray(self.center, float)


@dataclass(frozen=True)
class PhantomSpec:
    """Sum of components in ``R^n``."""

    n: int
    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError("phantoms are defined for n in (2, 3)")
        comps = tuple(self.components)
        for comp in comps:
            if comp.center is not None and len(comp.center) != self.n:
                raise ValueError(f"component center {comp.center} has wrong dimension")
        object.__setattr__(self, "components", comps)

    @property
    def smooth(self):
        return all(c.kind != "ball_indicator" for c in self.components)

    @property
    def is_zero(self):
        return all(c.weight == 0 for c in self.components)

    def __call__(self, y):
        y = np.asarray(y, float)
        out = np.zeros(y.shape[:-1])
        for comp in self.components:
            d2 = np.sum((y - comp.c(self.n)) ** 2, axis=-1) / comp.scale ** 2
            if comp.kind == "ball_indicator":
                out = out + comp.weight * (d2 <= 1.0)
            else:
                out = out + comp.weight * np.exp(-pi * d2)
        return out

    def radon(self, omega, t):
        """``R u(omega, t)``; ``omega`` is ``(M, n)``, ``t`` is ``(M, K)`` (complex ok for Gaussians)."""
        omega = np.asarray(omega, float)
        t = np.asarray(t)
        out = np.zeros(t.shape, dtype=np.result_type(t, float))
        for comp in self.components:
            s = comp.scale
            tp = t - (omega @ comp.c(self.n))[:, None]
            if comp.kind == "ball_indicator":
                r2 = np.clip(s * s - np.real(tp) ** 2, 0.0, None)
                chord = 2 * np.sqrt(r2) if self.n == 2 else pi * r2
                out = out + comp.weight * chord
            else:
                out = out + comp.weight * s ** (self.n - 1) * np.exp(-pi * tp * tp / (s * s))
        return out

    def hilbert_radon(self, omega, t):
        """``H R u(omega, t)``, Hilbert transform in t with kernel ``1 / (t - s)``."""
        omega = np.asarray(omega, float)
        t = np.asarray(t)
        out = np.zeros(t.shape, dtype=complex)
        for comp in self.components:
            s = comp.scale
            tp = t - (omega @ comp.c(self.n))[:, None]
            if comp.kind == "ball_indicator":
                if self.n != 2:
                    raise NotImplementedError("H R of a ball is implemented for n = 2 only")
                tr = np.real(tp)
                outside = np.abs(tr) > s
                root = np.sqrt(np.where(outside, tr * tr - s * s, 0.0))
                out = out + comp.weight * 2 * pi * (tr - np.sign(tr) * root * outside)
            else:
                # p.v. int exp(-pi s^2) / (t - s) ds = 2 sqrt(pi) D(sqrt(pi) t), D = Dawson
                out = out + comp.weight * s ** (self.n - 1) * 2 * sqrt(pi) * dawsn(sqrt(pi) * tp / s)
        return out

    def bargmann_data(self):
        """The function ``B_h`` must be fed to reproduce ``T_h u``: ``R u`` (odd n) or ``H R u`` (even n)."""
        if self.n % 2:
            return SinogramFunction(self.n, self.radon, Parity.EVEN_P)
        return SinogramFunction(self.n, self.hilbert_radon, Parity.SIGNED_PTILDE)

    def sinogram(self, dirs, t_spec, hilbert=None):
        """Sampled ``R u`` (``hilbert=False``) or ``H R u`` (``hilbert=True``); default follows parity of n."""
        hilbert = (self.n % 2 == 0) if hilbert is None else hilbert
        if hilbert:
            return sample_sino(self.hilbert_radon, dirs, t_spec, Parity.from_sign(-1, self.n))
        return sample_sino(lambda o, t: self.radon(o, t), dirs, t_spec, Parity.EVEN_P)

    def bargmann_T(self, z, h, weighted=False):
        """Closed-form ``T_h u(z)`` (Gaussian components only)."""
        if not self.smooth:
            raise ValueError("closed-form T_h is available for Gaussian components only")
        z = np.asarray(z, complex)
        out = np.zeros(z.shape[:-1], complex)
        for comp in self.components:
            s = comp.scale
            c = comp.c(self.n)
            val = comp.weight * scaled_gaussian_bargmann(self.n, h, z, c, s)
            if weighted:
                # fold exp(-pi |Im z|^2 / h) into the exponent
                d = z - c
                re = -pi * np.sum(d * d, axis=-1) / (h + s * s) - pi * np.sum(z.imag ** 2, axis=-1) / h
                val = comp.weight * 2 ** (self.n / 4) * h ** (-0.75 * self.n) \
                    * (h * s * s / (h + s * s)) ** (self.n / 2) * np.exp(re)
            out = out + val
        return out if out.ndim else complex(out)


def gaussian(n, center=None, scale=1.0, weight=1.0):
    kind = "gaussian" if center is None else "shifted_gaussian"
    return PhantomSpec(n, (Component(kind, None if center is None else tuple(center), scale, weight),))


def unit_disk(n=2, radius=1.0):
    return PhantomSpec(n, (Component("ball_indicator", None, radius, 1.0),))


def ball_husimi(x, xi, h, radius=1.0, center=None, n_r=None, n_theta=None):
    """``exp(-pi |xi|^2/h) T_h 1_B(x - i xi)`` for a disk in R^2 by polar quadrature.

    Gauss-Legendre in the radius and the trapezoid rule in angle; both are
    spectrally accurate because the integrand is smooth up to the circle.
    """
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    c = np.zeros(2) if center is None else np.asarray(center, float)
    freq = (np.linalg.norm(xi) + 1) * radius / h
    n_r = n_r or int(max(64, 3 * freq + 40))
    n_theta = n_theta or int(max(128, 6 * freq + 80))
    r, wr = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (r + 1)
    wr = 0.5 * radius * wr * r
    th = 2 * pi * np.arange(n_theta) / n_theta
    y = c + np.stack([np.outer(r, np.cos(th)), np.outer(r, np.sin(th))], axis=-1)
    d = x - y
    kern = np.exp(-pi * np.sum(d * d, axis=-1) / h + 2j * pi * (d @ xi) / h)
    val = (wr @ kern).sum() * 2 * pi / n_theta
    return complex(sqrt(2) * h ** -1.5 * val)
