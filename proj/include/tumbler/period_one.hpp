// Period-one structures of the blinking-rotation map.
//
// Points that are period-one for BOTH single-axis rotations are fixed
// points of the composed map regardless of composition order.  For one axis
// the period-one set of rotation angle theta is a surface of revolution:
// a "bowl" below the interface (bulk streamlines of period theta) matched
// to a "cap" above it (layer streamlines of period theta).  Intersecting
// the two axes' surfaces yields one-dimensional curves of fixed points;
// intersecting those curves with a hemispherical shell of radius R_bar
// yields isolated fixed points whose normal stability alternates with the
// sign of x*z.
#pragma once

#include <vector>

#include "tumbler/geometry.hpp"
#include "tumbler/map.hpp"

namespace tumbler {

// Bulk bowl constant c(eps, theta) in [eps^2, 1]: the period-one bowl for
// one axis is x^2 + y^2 + c z^2 = c (axis z; swap x and z for axis x), i.e.
// each cross-section's period-theta streamline has radius sqrt(c)*L.
// Evaluated in the pole-free form eps^2 / (cos^2 phi + eps^2 sin^2 phi)
// with phi = (theta - eps*pi)/2.
double bowl_constant(double eps, double theta);

// Layer cap constant d(eps, theta) in [0, 1]: the cap surface for axis z is
//   y*delta_z(x,z) + y^2/2 = delta_z(0,z)^2 (d^2/2 - d),
// whose apex depth at the section centre is y = -eps*L*d.
double cap_constant(double eps, double theta);

enum class CurveBranch { BulkBowl, LayerCap };

struct PeriodOneSample {
  Point3 position;
  CurveBranch branch = CurveBranch::BulkBowl;
  StabilityTag stability = StabilityTag::NormallyHyperbolic;
};

// |x*z| below this is tagged Parabolic by the sign rule.
inline constexpr double kParabolicTol = 1e-10;

// R_bar within this of a window endpoint is treated as the degenerate
// boundary shell (parabolic fixed points).
inline constexpr double kShellBoundaryTol = 1e-5;

// Samples the fixed-point curves of the composed map: the intersection of
// the two bulk bowls (clipped to below both interfaces) and the
// intersection of the two layer caps (traced by pseudo-arclength
// continuation with Newton correction).  n_samples is the approximate
// number of points per connected piece.  Stability comes from the sign of
// x*z: positive = normally hyperbolic, negative = normally elliptic.
std::vector<PeriodOneSample> sample_period_one_curves(const ProtocolParams& params,
                                                      int n_samples = 400);

// Radial window (r_lo, r_hi) of shell radii R_bar for which the shell
// carries non-degenerate fixed points: r_lo = sqrt(max(c1, c3)) and r_hi is
// where the fixed points reach the layer interface.
struct ExistenceWindow {
  double r_lo = 0.0;
  double r_hi = 0.0;
};
ExistenceWindow shell_existence_window(const ProtocolParams& params);

struct ShellPoint {
  Point3 position;
  StabilityTag stability = StabilityTag::NormallyHyperbolic;
};

// Fixed points of the composed map on the shell of radius r_bar: four
// (two hyperbolic, two elliptic) strictly inside the existence window,
// the degenerate parabolic point(s) within kShellBoundaryTol of r_lo
// (one point for equal rotation angles, two otherwise), and none outside.
std::vector<ShellPoint> shell_fixed_points(const ProtocolParams& params, double r_bar);

// Rotation angles that extremise the bowl constant for a given eps:
// theta = eps*pi collapses the bowl onto the innermost streamline
// (c = eps^2, structures confined to the layer's reach) and
// theta = (1+eps)*pi pushes it to the tumbler wall (c = 1).
struct OptimalAngles {
  double theta_min = 0.0;  // argmin of c
  double c_min = 0.0;
  double theta_max = 0.0;  // argmax of c
  double c_max = 0.0;
};
OptimalAngles optimal_angles(double eps);

// One cell of the bowl-depth parameter sweep: c(eps, theta) and how far the
// bowl dips below the layer (sqrt(c) - eps at the section centre).  locus
// flags cells on the extremal-angle curves: 1 for theta = eps*pi, 2 for
// theta = (1+eps)*pi, 0 elsewhere.
struct BowlGridCell {
  double eps = 0.0;
  double theta = 0.0;
  double c = 0.0;
  double depth_below_layer = 0.0;
  int locus = 0;
};

// Row-major grid over [eps_lo, eps_hi] x [theta_lo, theta_hi].  The OpenMP
// variant shards rows across jobs threads; both produce identical output.
std::vector<BowlGridCell> bowl_depth_grid(double eps_lo, double eps_hi, int n_eps,
                                          double theta_lo, double theta_hi, int n_theta,
                                          int jobs = 1);
std::vector<BowlGridCell> bowl_depth_grid_serial(double eps_lo, double eps_hi, int n_eps,
                                                 double theta_lo, double theta_hi, int n_theta);

}  // namespace tumbler
