#!/usr/bin/env python3
"""Walk through the explicit constants, from the comparison root up to the
two-branch gap bound.

Run:  python3 demos/01_explicit_constants.py
"""

import math

import numpy as np

from roughlap import constants as con
from roughlap.constants import AbstractConstants, GeometryBudget

print("== comparison root C(lam): sandwich floor <= lam*C <= sine integral ==")
print(f"{'n':>2} {'lam':>8} {'lam*C(lam)':>14} {'floor':>12} {'sine integral':>14}")
for n in (2, 4, 8):
    w = con.sin_power_integral(n)
    coef = con.root_floor_coefficient(n)
    for lam in (0.01, 0.5, 2.0, 10.0):
        lam_c = lam * con.comparison_root(n, lam)
        floor = coef * math.exp(-(n - 1) * lam)
        print(f"{n:>2} {lam:>8.3g} {lam_c:>14.6e} {floor:>12.4e} {w:>14.8f}")

print("\nsmall-lam limit of lam*C(lam) is (n*w+1)^(1/n) - 1, not w itself:")
for n in (2, 3, 4):
    print(f"  n={n}: limit {con.comparison_root_limit(n):.8f}  "
          f"(sine integral {con.sin_power_integral(n):.8f})")

print("\n== Moser product: converged partial product vs closed-form bound ==")
for t, g in ((0.1, 1.5), (1.0, 2.0), (100.0, 1.1)):
    value, terms = con.moser_product_converged(t, g)
    bound = con.moser_product_bound(t, g)
    print(f"  t={t:<6g} gamma={g:<4g}: product {value:.6f} "
          f"({terms} terms) <= bound {bound:.6f}")

print("\n== gap lower bound for sqrt(lambda_1)*D, dim 4, p 4, constants 1 ==")
budget0 = GeometryBudget(dim=4, kappa=0.0, diameter=1.0, p_exponent=4.0)
print(f"  kappa = K = 0: rhs = {con.oneform_gap_lower_bound(budget0)!r} "
      f"(= 1/(4e) = {1 / (4 * math.e)!r})")

print("  kappa sweep (monotone non-increasing):")
for kappa in np.linspace(0.0, 2.0, 5):
    b = GeometryBudget(dim=4, kappa=float(kappa), diameter=1.0, p_exponent=4.0)
    print(f"    kappa={kappa:.2f}: rhs = {con.oneform_gap_lower_bound(b):.8f}")

print("  the abstract constants scale everything; halving the bootstrap "
      "constant raises the bound:")
for c0 in (1.0, 0.5, 0.25):
    rhs = con.oneform_gap_lower_bound(budget0, AbstractConstants(c0_np=c0))
    print(f"    c0_np={c0}: rhs = {rhs:.8f}")
