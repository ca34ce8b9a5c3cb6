#!/usr/bin/env python3
"""The curvature identity on 1-forms, checked spectrally: the Hodge
Laplacian equals the connection Laplacian plus the Gauss curvature, so
their eigenvalue lists differ by K -- exactly 0 on the flat torus, 1/r^2 on
the sphere.

Run:  python3 demos/04_weitzenboeck_shift.py
"""

import math

from roughlap.mesh import generate_flat_torus, generate_icosphere
from roughlap.operators import weitzenboeck_eigen_check

for label, mesh in (
    ("flat 2pi-torus 32x32 (K = 0)", generate_flat_torus(2 * math.pi, 2 * math.pi, 32, 32)),
    ("unit icosphere s=4 (K = 1)", generate_icosphere(1.0, 4)),
):
    print(f"== {label} ==")
    rows = weitzenboeck_eigen_check(mesh, 6)
    print(f"{'hodge mu':>12} {'rough lam':>12} {'K':>8} {'mismatch':>10}")
    for mu, lam, shift, resid in rows:
        print(f"{mu:>12.6f} {lam:>12.6f} {shift:>8.4f} {resid:>10.2e}")
    print()

print("the torus rows agree to roundoff (identical discrete spectra);")
print("the sphere rows agree to the discretization error, which shrinks")
print("under refinement -- that is the acceptance criterion.")
