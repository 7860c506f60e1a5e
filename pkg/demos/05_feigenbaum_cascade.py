"""
The period-doubling cascade and its accumulation parameter
==========================================================

c_k is the real parameter whose critical orbit returns to 0 after
exactly 2^k steps (a superstable cycle).  The gaps c_k - c_{k+1} shrink
geometrically with ratio approaching the universal doubling constant
~4.6692, and the sequence accumulates at the Feigenbaum parameter
c_F ~= -1.401155, the infinitely renormalizable map whose postcritical
set is a Cantor attractor.
"""

from nexlab import derive_feigenbaum_parameter

param = derive_feigenbaum_parameter(10)

print(f"{'k':>3s} {'c_k':>22s} {'return residual':>16s} {'gap ratio':>11s}")
for k, (c, res) in enumerate(zip(param.cs, param.residuals), start=1):
    ratio = f"{param.ratios[k - 3]:.6f}" if k >= 3 else ""
    print(f"{k:3d} {c:22.15f} {res:16.2e} {ratio:>11s}")

print(f"\nextrapolated accumulation parameter: {param.c_limit:.12f}")
print("the gap ratios converge to the doubling constant 4.669201...")
