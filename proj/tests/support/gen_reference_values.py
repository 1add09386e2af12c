#!/usr/bin/env python3
"""Regenerate tests/reference_values.hpp.

Evaluates the closed-form expressions of the tumbler model (layer entry
points, streamline periods, period-one bowl/cap constants, shell fixed
points, existence windows, radial-exit predictions) with 40-digit
arithmetic and freezes them as double literals.  The C++ implementation
must reproduce these numbers; the unit tests compare against them with
tolerances far looser than the 1e-22 rounding error of this script.

Run from the repository root:  python3 tests/support/gen_reference_values.py
"""

from mpmath import mp, mpf, pi, cos, sin, sqrt, asin

mp.dps = 40

OUT = "tests/reference_values.hpp"

constants = []  # (name, value, comment)


def emit(name, value, comment):
    constants.append((name, mpf(value), comment))


# ----------------------------------------------------------------------
# Cross-section trajectory quantities, eps = 0.15, section z = 0 (L = 1).
# Seed (x0, y0) = (0, -0.5) lies in the bulk.
eps = mpf("0.15")
L = mpf(1)
x0, y0 = mpf(0), mpf("-0.5")
R = sqrt(x0**2 + y0**2)
x1 = -sqrt((R**2 - eps**2 * L**2) / (1 - eps**2))
y1 = -eps * sqrt(L**2 - x1**2)
emit("kBulkEntryX1", x1, "layer entry abscissa for bulk seed (0,-0.5), eps=0.15, z=0")
emit("kBulkEntryY1", y1, "layer entry depth for the same seed")
emit("kBulkTimeToEntry", asin(x0 / R) + asin(-x1 / R),
     "clockwise arc time from (0,-0.5) to the entry point")
emit("kBulkSeedPeriod", -2 * asin(x1 / R) + eps * pi,
     "full streamline period through (0,-0.5)")
# Pure bulk arc: advance (0,-0.5) by t=1 (stays below the interface).
t = mpf(1)
emit("kBulkArc1X", R * sin(asin(x0 / R) - t), "bulk arc position after t=1")
emit("kBulkArc1Y", -R * cos(asin(x0 / R) - t), "bulk arc position after t=1")
# And by t = pi/4 (the -0.5/sqrt(2) diagonal point).
emit("kBulkArcQuarterX", R * sin(-pi / 4), "bulk arc position after t=pi/4")

# Layer seed (0.1, -0.05), eps=0.15, z=0: within-layer advance by t=0.1,
# plus its virtual entry amplitude and remaining transit time.
xl, yl = mpf("0.1"), mpf("-0.05")
delta = lambda u: eps * sqrt(L**2 - u**2)
kap = (2 / eps**2) * (delta(xl) * yl + yl**2 / 2)
A = sqrt(L**2 + kap)
alpha = asin(xl / A)
emit("kLayerSeedAmplitude", A, "virtual entry amplitude |x1| for layer seed (0.1,-0.05)")
emit("kLayerSeedTimeToExit", eps * (pi / 2 - alpha), "remaining layer transit time")
tl = mpf("0.1")
xadv = A * sin(alpha + tl / eps)
emit("kLayerAdv01X", xadv, "layer position after t=0.1")
emit("kLayerAdv01Y", -delta(xadv) + eps * sqrt(A**2 - xadv**2), "layer position after t=0.1")

# ----------------------------------------------------------------------
# Period-one structure constants at (eps, theta) = (0.15, pi).
theta = pi
phi = (theta - eps * pi) / 2
c1 = eps**2 / (cos(phi) ** 2 + eps**2 * sin(phi) ** 2)
d1 = 1 - eps * abs(sin(phi)) / sqrt(cos(phi) ** 2 + eps**2 * sin(phi) ** 2)
emit("kBowlC_015_pi", c1, "bowl constant c(0.15, pi)")
emit("kSqrtBowlC_015_pi", sqrt(c1), "sqrt of bowl constant = deepest bowl radius")
emit("kCapD_015_pi", d1, "cap constant d(0.15, pi)")
emit("kCapApexY_015_pi", -eps * d1, "cap apex depth y0 = -eps*d at z=0")

# Streamline period through the cap apex must equal theta (= pi here).
y0c = -eps * d1
kapc = (2 / eps**2) * (eps * y0c + y0c**2 / 2)
x1c = -sqrt(1 + kapc)
y1c = -eps * sqrt(1 - x1c**2)
period_cap = -2 * asin(x1c / sqrt(x1c**2 + y1c**2)) + eps * pi
assert abs(period_cap - pi) < mpf("1e-35"), period_cap

# Symmetric equal-angle existence window (eps=0.15, theta_z=theta_x=pi).
r_lo = sqrt(c1)
r_hi = sqrt((eps**2 * (1 + c1) - 2 * c1) / (2 * eps**2 - (1 + c1)))
emit("kWindowLo_015_pi", r_lo, "existence-window lower radius, symmetric case")
emit("kWindowHi_015_pi", r_hi, "existence-window upper radius, symmetric case")

# Shell fixed points on R_bar = 0.62 (symmetric case).
Rb = mpf("0.62")
xs = sqrt((Rb**2 - c1) / (1 - c1))
ys = -sqrt(c1 - (1 + c1) / (1 - c1) * (Rb**2 - c1))
assert abs(xs**2 + ys**2 + xs**2 - Rb**2) < mpf("1e-35")
emit("kShell062X", xs, "|x*| = |z*| of the four shell points at R_bar=0.62")
emit("kShell062Y", ys, "y* of the four shell points at R_bar=0.62")

# Cap-curve sample in the symmetric case: on x = z at z = 0.1.
q1 = d1**2 / 2 - d1
zc = mpf("0.1")
dxz = eps * sqrt(1 - 2 * zc**2)
disc = dxz**2 + 2 * eps**2 * (1 - zc**2) * q1
ycap = -dxz + sqrt(disc)
emit("kCapSampleZ01Y", ycap, "cap-curve depth at x=z=0.1, (0.15, pi)")
emit("kCapCurveZMax", sqrt((1 + 2 * q1) / (2 * (1 + q1))),
     "|z| extent of the symmetric cap curve on x=z")

# ----------------------------------------------------------------------
# Unequal angles: theta_z = pi, theta_x = 19*pi/20 (eps = 0.15 both axes).
theta_x = 19 * pi / 20
phi3 = (theta_x - eps * pi) / 2
c3 = eps**2 / (cos(phi3) ** 2 + eps**2 * sin(phi3) ** 2)
emit("kBowlC_015_19pi20", c3, "bowl constant c(0.15, 19pi/20)")
num = (eps**2 - c1) * (1 - c3) + (eps**2 - 1) * (1 - c1) * c3
den = (eps**2 - c1) * (1 - c3) + (eps**2 - 1) * (1 - c1)
r_hi2 = sqrt(num / den)
# Cross-check against the independent derivation (interface condition
# y*^2 = eps^2 (1 - x*^2 - z*^2) with x*, z* eliminated through the bowls).
P = 1 / (1 - c3) + 1 / (1 - c1)
Q = c3 / (1 - c3) + c1 / (1 - c1)
r_hi2_indep = sqrt((eps**2 - (1 - eps**2) * Q) / (1 - (1 - eps**2) * P))
assert abs(r_hi2 - r_hi2_indep) < mpf("1e-35")
emit("kWindow2Lo", sqrt(max(c1, c3)), "existence-window lower radius, unequal angles")
emit("kWindow2Hi", r_hi2, "existence-window upper radius, unequal angles")

# Shell fixed points at R_bar = 0.60 for the unequal-angle case.
Rb2 = mpf("0.6")
xs2 = sqrt((Rb2**2 - c3) / (1 - c3))
zs2 = sqrt((Rb2**2 - c1) / (1 - c1))
ys2 = -sqrt(c1 - c1 * (Rb2**2 - c1) / (1 - c1) - (Rb2**2 - c3) / (1 - c3))
assert abs(xs2**2 + ys2**2 + zs2**2 - Rb2**2) < mpf("1e-35")
emit("kShell2_06X", xs2, "|x*| of shell points at R_bar=0.6, unequal angles")
emit("kShell2_06Z", zs2, "|z*| of shell points at R_bar=0.6, unequal angles")
emit("kShell2_06Y", ys2, "y* of shell points at R_bar=0.6, unequal angles")

# ----------------------------------------------------------------------
# Radial-transport worked cases.
# Entry point into the layer for a bulk shell radius r_i, section z0.
ri, z0 = mpf("0.62"), mpf("0.1")
emit("kRadEntryX1", -sqrt((ri**2 - eps**2) / (1 - eps**2) - z0**2),
     "layer entry x1 for bulk radius 0.62 at z0=0.1, eps_z=0.15")
emit("kRadEntryY1", -eps * sqrt((1 - ri**2) / (1 - eps**2)),
     "layer entry y1 for the same case")

# Exit-radius prediction for a switch point caught mid-layer.
ex = mpf("0.18")
px, py, pz = mpf("0.1"), mpf("-0.05"), mpf("0.2")
dx = ex * sqrt(1 - px**2 - pz**2)
kappa = (dx * py + py**2 / 2) / ex**2
emit("kSwitchKappa", kappa, "second-axis streamline constant at (0.1,-0.05,0.2), eps_x=0.18")
emit("kSwitchExitR", sqrt(1 + 2 * kappa * (1 - ex**2)),
     "predicted bulk exit radius for the same switch point")


def fmt(v):
    s = mp.nstr(v, 17, strip_zeros=False)
    return s


with open(OUT, "w") as f:
    f.write("// Frozen reference values for the unit and acceptance tests.\n")
    f.write("// Generated by tests/support/gen_reference_values.py (40-digit\n")
    f.write("// arithmetic); do not edit by hand.\n")
    f.write("#pragma once\n\n")
    f.write("namespace tumbler::testing {\n\n")
    for name, value, comment in constants:
        f.write(f"// {comment}\n")
        f.write(f"inline constexpr double {name} = {fmt(value)};\n\n")
    f.write("}  // namespace tumbler::testing\n")

print(f"wrote {OUT} with {len(constants)} constants")
