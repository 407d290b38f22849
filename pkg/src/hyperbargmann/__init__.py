"""Radon transform, semiclassical Bargmann transforms and microlocal decay tests.

Submodules
----------
special      Hermite polynomials and normalization constants.
grids        Box, sphere and t grids; parity bookkeeping.
transforms   Radon transform and dual, Hilbert transform, |D_t|^(n-1), h-Fourier transform.
bargmann     T_h on R^n, B_h on hyperplane space, coherent states.
microlocal   Canonical transforms, phase critical points, decay scans.
phantoms     Test objects with closed-form Radon data.
storage      CSV / binary serialization.
experiments  Verification suites used by the CLI.
"""

__version__ = "0.1.0"
