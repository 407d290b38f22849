"""Hermite polynomials at complex argument and the normalization constants.

Two families of constants live here.  ``constant_C`` and ``constant_A`` are
the closed forms as printed for the hyperplane Bargmann transform.  The
``*_constant`` functions below them are the normalizations that actually make
the inversion formula, the Plancherel identity and ``T_h = B_h R`` hold with
the unnormalized surface measure ``d omega`` used throughout this package;
the transforms use those.
"""

from math import factorial, gamma, pi, sqrt

import numpy as np


def hermite(l, s):
    """Physicists' Hermite polynomial ``H_l(s)`` by three-term recurrence.

    Parameters
    ----------
    l : int
        Degree, ``l >= 0``.
    s : complex or array_like
        Evaluation point(s).  Complex input is fine.

    Returns
    -------
    complex or numpy.ndarray
        ``H_l(s)``, same shape as ``s``.
    """
    if int(l) != l or l < 0:
        raise ValueError(f"Hermite degree must be a non-negative integer, got {l!r}")
    l = int(l)
    s = np.asarray(s)
    prev = np.ones_like(s, dtype=np.result_type(s, float))
    if l == 0:
        return prev if prev.ndim else prev[()]
    cur = 2 * s
    # H_{j+1} = 2 s H_j - 2 j H_{j-1}
    for j in range(1, l):
        prev, cur = cur, 2 * s * cur - 2 * j * prev
    return cur if np.ndim(cur) else cur[()]


def hermite_sum(l, s):
    """Explicit-sum form of ``H_l``; kept as an independent oracle."""
    s = np.asarray(s)
    out = np.zeros_like(s, dtype=np.result_type(s, float))
    for j in range(l // 2 + 1):
        out = out + (-1) ** j / (factorial(j) * factorial(l - 2 * j)) * (2 * s) ** (l - 2 * j)
    out = factorial(l) * out
    return out if out.ndim else out[()]


def _check_dim(n):
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def constant_C(n):
    """``(4 pi)^{(n-1)/2} Gamma(n/2) Gamma(1/2)`` as printed."""
    n = _check_dim(n)
    return (4 * pi) ** ((n - 1) / 2) * gamma(n / 2) * gamma(0.5)


def constant_A(n):
    """Printed closed form of the ``B_h`` prefactor.

    ``(-1)^{k-1/2}`` for even ``n = 2k`` is taken on the principal branch,
    ``i (-1)^{k-1}``, so the value is purely imaginary for even ``n``.
    """
    n = _check_dim(n)
    if n % 2:
        k = (n - 1) // 2
        return complex((-1) ** k * factorial(k) / (2 ** (k / 2 - 0.25) * factorial(2 * k)))
    k = n // 2
    return 1j * (-1) ** (k - 1) * sqrt(pi) / (2 ** (1.5 * k) * factorial(k - 1))


def sphere_area(n):
    """Surface area of the unit sphere ``S^{n-1}`` in ``R^n``."""
    n = _check_dim(n)
    return 2 * pi ** (n / 2) / gamma(n / 2)


def inversion_constant(n):
    """Constant ``c`` with ``u = c^{-1} R*(|D_t|^{n-1} R u)``.

    ``R*`` integrates over the whole sphere with the unnormalized measure,
    which gives ``2 (2 pi)^{n-1}``.  Equivalently
    ``(4 pi)^{(n-1)/2} Gamma(n/2) / Gamma(1/2) * |S^{n-1}|``.
    """
    n = _check_dim(n)
    return 2 * (2 * pi) ** (n - 1)


def plancherel_constant(n):
    """Constant ``c`` with ``c * int u v dx = iint_{P^n} |D_t|^{n-1}Ru . Rv``.

    The right side integrates over the space of hyperplanes, i.e. half of
    ``S^{n-1} x R``, so this is half the inversion constant.
    """
    return inversion_constant(n) / 2


def bargmann_B_constant(n):
    """Prefactor of ``B_h`` that makes ``T_h = B_h R`` (odd n) / ``B_h H R`` (even n).

    Obtained by pushing ``T_h`` through the Plancherel identity and
    integrating by parts with ``(h^{-1/2} d/dt)^{n-1} e^{-pi s^2/h}``.
    Real for every ``n``; the sign alternates with ``k = floor(n/2)``.
    """
    n = _check_dim(n)
    base = 2 ** (n / 4) * (2 * pi) ** (1 - n)
    if n % 2:
        k = (n - 1) // 2
        return (-1) ** k * base * pi ** k
    k = n // 2
    return (-1) ** k * base * pi ** (k - 1.5)


def gaussian_bargmann_oracle(n, h, z):
    """Closed form of ``T_h`` applied to ``exp(-pi |y|^2)``.

    ``z`` may be a single point of shape ``(n,)`` or a stack ``(..., n)``.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    z = np.asarray(z, dtype=complex)
    z2 = np.sum(z * z, axis=-1)
    return 2 ** (n / 4) * h ** (-0.75 * n) * (h / (1 + h)) ** (n / 2) * np.exp(-pi * z2 / (1 + h))


def scaled_gaussian_bargmann(n, h, z, center=None, scale=1.0):
    """``T_h`` of ``exp(-pi |y - c|^2 / s^2)`` in closed form."""
    z = np.asarray(z, dtype=complex)
    c = np.zeros(n) if center is None else np.asarray(center, float)
    d = z - c
    s2 = scale * scale
    d2 = np.sum(d * d, axis=-1)
    return 2 ** (n / 4) * h ** (-0.75 * n) * (h * s2 / (h + s2)) ** (n / 2) * np.exp(-pi * d2 / (h + s2))
