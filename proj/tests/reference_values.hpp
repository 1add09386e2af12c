// Frozen reference values for the unit and acceptance tests.
// Generated by tests/support/gen_reference_values.py (40-digit
// arithmetic); do not edit by hand.
#pragma once

namespace tumbler::testing {

// layer entry abscissa for bulk seed (0,-0.5), eps=0.15, z=0
inline constexpr double kBulkEntryX1 = -0.48242779033760646;

// layer entry depth for the same seed
inline constexpr double kBulkEntryY1 = -0.13139036155660134;

// clockwise arc time from (0,-0.5) to the entry point
inline constexpr double kBulkTimeToEntry = 1.3048932404240466;

// full streamline period through (0,-0.5)
inline constexpr double kBulkSeedPeriod = 3.0810253788865622;

// bulk arc position after t=1
inline constexpr double kBulkArc1X = -0.42073549240394825;

// bulk arc position after t=1
inline constexpr double kBulkArc1Y = -0.27015115293406986;

// bulk arc position after t=pi/4
inline constexpr double kBulkArcQuarterX = -0.35355339059327376;

// virtual entry amplitude |x1| for layer seed (0.1,-0.05)
inline constexpr double kLayerSeedAmplitude = 0.66916825465650352;

// remaining layer transit time
inline constexpr double kLayerSeedTimeToExit = 0.21311927996259754;

// layer position after t=0.1
inline constexpr double kLayerAdv01X = 0.48773564392826538;

// layer position after t=0.1
inline constexpr double kLayerAdv01Y = -0.062226423686845615;

// bowl constant c(0.15, pi)
inline constexpr double kBowlC_015_pi = 0.29694910019266800;

// sqrt of bowl constant = deepest bowl radius
inline constexpr double kSqrtBowlC_015_pi = 0.54493036270028853;

// cap constant d(0.15, pi)
inline constexpr double kCapD_015_pi = 0.47012610659884341;

// cap apex depth y0 = -eps*d at z=0
inline constexpr double kCapApexY_015_pi = -0.070518915989826511;

// existence-window lower radius, symmetric case
inline constexpr double kWindowLo_015_pi = 0.54493036270028853;

// existence-window upper radius, symmetric case
inline constexpr double kWindowHi_015_pi = 0.67161754875834059;

// |x*| = |z*| of the four shell points at R_bar=0.62
inline constexpr double kShell062X = 0.35268643566316286;

// y* of the four shell points at R_bar=0.62
inline constexpr double kShell062Y = -0.36827239402163634;

// cap-curve depth at x=z=0.1, (0.15, pi)
inline constexpr double kCapSampleZ01Y = -0.070845335962898794;

// |z| extent of the symmetric cap curve on x=z
inline constexpr double kCapCurveZMax = 0.46820664104785025;

// bowl constant c(0.15, 19pi/20)
inline constexpr double kBowlC_015_19pi20 = 0.19422848922198274;

// existence-window lower radius, unequal angles
inline constexpr double kWindow2Lo = 0.54493036270028853;

// existence-window upper radius, unequal angles
inline constexpr double kWindow2Hi = 0.62481428786821521;

// |x*| of shell points at R_bar=0.6, unequal angles
inline constexpr double kShell2_06X = 0.45357487926218357;

// |z*| of shell points at R_bar=0.6, unequal angles
inline constexpr double kShell2_06Z = 0.29946926742500898;

// y* of shell points at R_bar=0.6, unequal angles
inline constexpr double kShell2_06Y = -0.25414166673378069;

// layer entry x1 for bulk radius 0.62 at z0=0.1, eps_z=0.15
inline constexpr double kRadEntryX1 = -0.60019178520547329;

// layer entry y1 for the same case
inline constexpr double kRadEntryY1 = -0.11903705713712435;

// second-axis streamline constant at (0.1,-0.05,0.2), eps_x=0.18
inline constexpr double kSwitchKappa = -0.23216404044222431;

// predicted bulk exit radius for the same switch point
inline constexpr double kSwitchExitR = 0.74210251915500699;

}  // namespace tumbler::testing
