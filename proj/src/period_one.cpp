#include "tumbler/period_one.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tumbler {

namespace {

constexpr double kPi = std::numbers::pi;

void check_eps(double eps) {
  if (!(eps > 0.0) || !(eps <= 0.5)) {
    throw std::invalid_argument("layer depth ratio must lie in (0, 0.5]");
  }
}

// Half the rotation angle spent outside the layer, per streamline loop.
double half_bulk_angle(double eps, double theta) { return 0.5 * (theta - eps * kPi); }

// True when a rotation by theta admits a genuine period-one surface: the
// closed-streamline period ranges over [eps*pi, (1+eps)*pi] only.
bool genuine_angle(double eps, double theta) {
  return theta >= eps * kPi && theta <= (1.0 + eps) * kPi;
}

// Right-hand side of the layer-sheet equation delta*y + y^2/2 = eps^2 L^2 q:
// q < 0 encodes how far the sheet dips below the free surface.
double cap_q(double eps, double theta) {
  const double d = cap_constant(eps, theta);
  return 0.5 * d * d - d;
}

StabilityTag quadrant_stability(double x, double z) {
  const double prod = x * z;
  if (std::abs(prod) <= kParabolicTol) return StabilityTag::Parabolic;
  return prod > 0.0 ? StabilityTag::NormallyHyperbolic : StabilityTag::NormallyElliptic;
}

// Appends the four mirror images of a quadrant sample (the curves are even
// in x and in z), skipping duplicates on the coordinate planes.
void emit_mirrors(std::vector<PeriodOneSample>& out, double x, double y, double z,
                  CurveBranch branch) {
  const double xs[2] = {x, -x};
  const double zs[2] = {z, -z};
  const int nx = x > 0.0 ? 2 : 1;
  const int nz = z > 0.0 ? 2 : 1;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nz; ++j) {
      out.push_back({{xs[i], y, zs[j]}, branch, quadrant_stability(xs[i], zs[j])});
    }
  }
}

}  // namespace

double bowl_constant(double eps, double theta) {
  check_eps(eps);
  const double phi = half_bulk_angle(eps, theta);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return eps * eps / (c * c + eps * eps * s * s);
}

double cap_constant(double eps, double theta) {
  check_eps(eps);
  const double phi = half_bulk_angle(eps, theta);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return 1.0 - eps * std::abs(s) / std::sqrt(c * c + eps * eps * s * s);
}

std::vector<PeriodOneSample> sample_period_one_curves(const ProtocolParams& params,
                                                      int n_samples) {
  params.validate();
  if (n_samples < 4) throw std::invalid_argument("n_samples must be at least 4");
  std::vector<PeriodOneSample> out;
  if (!genuine_angle(params.eps_z, params.theta_z) ||
      !genuine_angle(params.eps_x, params.theta_x)) {
    return out;  // no closed streamline matches the rotation angle
  }
  const double c1 = bowl_constant(params.eps_z, params.theta_z);
  const double c3 = bowl_constant(params.eps_x, params.theta_x);
  const double q1 = cap_q(params.eps_z, params.theta_z);
  const double q3 = cap_q(params.eps_x, params.theta_x);
  const int n_grid = std::max(2, n_samples / 4);

  // Deep branch: eliminate y between the two ellipsoids.  For each |z| the
  // curve crosses at x^2 = [(c1-c3) + (1-c1) z^2] / (1-c3), truncated where
  // it rises into either flowing layer.
  for (int i = 0; i < n_grid; ++i) {
    const double z = static_cast<double>(i) / (n_grid - 1);  // quadrant sweep
    if (z >= 1.0) continue;
    const double x2 = ((c1 - c3) + (1.0 - c1) * z * z) / (1.0 - c3);
    if (x2 < 0.0 || x2 >= 1.0 - z * z) continue;
    const double x = std::sqrt(x2);
    const double y2 = c1 * (1.0 - z * z) - x2;
    if (y2 <= 0.0) continue;
    const double y = -std::sqrt(y2);
    const double dz = flowing_layer_depth(params.eps_z, x, z);
    const double dx = flowing_layer_depth(params.eps_x, x, z);
    if (y > -std::max(dz, dx) + 1e-12) continue;  // inside a layer: cap branch owns it
    emit_mirrors(out, x, y, z, CurveBranch::BulkBowl);
  }

  // Layer branch: the same streamline family continued into the layers.
  // The two sheets are delta_a(x,z) y + y^2/2 = eps_a^2 L_a^2 q_a with
  // L_z^2 = 1 - z^2, L_x^2 = 1 - x^2; intersect them per z-line.
  const double span = 1.0 + 2.0 * q1;  // (amplitude/L)^2 of the layer arc
  if (span <= 0.0) return out;
  const auto sheet_depth = [&](double x, double z) {
    // Upper root of the z-axis sheet; NaN when the sheet is absent here.
    const double dz = flowing_layer_depth(params.eps_z, x, z);
    const double disc =
        dz * dz + 2.0 * params.eps_z * params.eps_z * (1.0 - z * z) * q1;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -dz + std::sqrt(disc);
  };
  const auto other_sheet = [&](double x, double y, double z) {
    const double dx = flowing_layer_depth(params.eps_x, x, z);
    return dx * y + 0.5 * y * y -
           params.eps_x * params.eps_x * (1.0 - x * x) * q3;
  };
  for (int i = 0; i < n_grid; ++i) {
    const double z = static_cast<double>(i) / (n_grid - 1);
    const double x_hi2 = (1.0 - z * z) * span;
    if (x_hi2 <= 0.0 || z >= 1.0) continue;
    const double x_hi = std::sqrt(x_hi2) * (1.0 - 1e-12);
    constexpr int kScan = 400;
    double prev_x = 0.0;
    double prev_g = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k <= kScan; ++k) {
      const double x = x_hi * static_cast<double>(k) / kScan;
      const double y = sheet_depth(x, z);
      const double g = std::isnan(y) ? std::numeric_limits<double>::quiet_NaN()
                                     : other_sheet(x, y, z);
      if (!std::isnan(g) && !std::isnan(prev_g) && g * prev_g <= 0.0 &&
          (g != prev_g || g == 0.0)) {
        double lo = prev_x, hi = x, glo = prev_g;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = other_sheet(mid, sheet_depth(mid, z), z);
          if (gm * glo <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            glo = gm;
          }
        }
        const double xr = 0.5 * (lo + hi);
        const double yr = sheet_depth(xr, z);
        const double dxr = flowing_layer_depth(params.eps_x, xr, z);
        if (!std::isnan(yr) && yr <= 0.0 && yr + dxr >= 0.0) {
          emit_mirrors(out, xr, yr, z, CurveBranch::LayerCap);
        }
      }
      prev_x = x;
      prev_g = g;
    }
  }
  return out;
}

ExistenceWindow shell_existence_window(const ProtocolParams& params) {
  params.validate();
  if (!genuine_angle(params.eps_z, params.theta_z) ||
      !genuine_angle(params.eps_x, params.theta_x)) {
    throw std::domain_error("no period-one structure exists for these rotation angles");
  }
  const double c1 = bowl_constant(params.eps_z, params.theta_z);
  const double c3 = bowl_constant(params.eps_x, params.theta_x);
  const double eps = std::max(params.eps_z, params.eps_x);
  const double e2 = eps * eps;
  ExistenceWindow w;
  w.r_lo = std::sqrt(std::max(c1, c3));
  // Upper radius: the depth of the four-point ring reaches the deeper layer
  // interface, y*^2 = eps^2 (1 - x*^2 - z*^2), with x*, z* eliminated
  // through the two ellipsoids.
  const double p_sum = 1.0 / (1.0 - c3) + 1.0 / (1.0 - c1);
  const double q_sum = c3 / (1.0 - c3) + c1 / (1.0 - c1);
  const double num = e2 - (1.0 - e2) * q_sum;
  const double den = 1.0 - (1.0 - e2) * p_sum;
  w.r_hi = (den != 0.0 && num / den > 0.0) ? std::sqrt(num / den) : w.r_lo;
  return w;
}

std::vector<ShellPoint> shell_fixed_points(const ProtocolParams& params, double r_bar) {
  if (!(r_bar > 0.0) || !(r_bar <= 1.0)) {
    throw std::invalid_argument("shell radius must lie in (0, 1]");
  }
  const ExistenceWindow w = shell_existence_window(params);
  const double c1 = bowl_constant(params.eps_z, params.theta_z);
  const double c3 = bowl_constant(params.eps_x, params.theta_x);
  std::vector<ShellPoint> pts;

  if (std::abs(r_bar - w.r_lo) <= kShellBoundaryTol) {
    // Degenerate ring: the four points coalesce pairwise (or fully) on the
    // shell that is tangent to the deeper ellipsoid.
    if (std::abs(c1 - c3) <= 1e-14) {
      pts.push_back({{0.0, -r_bar, 0.0}, StabilityTag::Parabolic});
    } else if (c1 > c3) {
      const double x2 = std::max(0.0, (r_bar * r_bar - c3) / (1.0 - c3));
      const double x = std::sqrt(x2);
      const double y = -std::sqrt(std::max(0.0, r_bar * r_bar - x2));
      pts.push_back({{x, y, 0.0}, StabilityTag::Parabolic});
      pts.push_back({{-x, y, 0.0}, StabilityTag::Parabolic});
    } else {
      const double z2 = std::max(0.0, (r_bar * r_bar - c1) / (1.0 - c1));
      const double z = std::sqrt(z2);
      const double y = -std::sqrt(std::max(0.0, r_bar * r_bar - z2));
      pts.push_back({{0.0, y, z}, StabilityTag::Parabolic});
      pts.push_back({{0.0, y, -z}, StabilityTag::Parabolic});
    }
    return pts;
  }
  if (r_bar < w.r_lo || r_bar > w.r_hi) return pts;  // shell misses the curve

  const double x2 = (r_bar * r_bar - c3) / (1.0 - c3);
  const double z2 = (r_bar * r_bar - c1) / (1.0 - c1);
  const double x = std::sqrt(std::max(0.0, x2));
  const double z = std::sqrt(std::max(0.0, z2));
  const double y = -std::sqrt(std::max(0.0, r_bar * r_bar - x2 - z2));
  for (const double sx : {+1.0, -1.0}) {
    for (const double sz : {+1.0, -1.0}) {
      pts.push_back({{sx * x, y, sz * z}, quadrant_stability(sx * x, sz * z)});
    }
  }
  return pts;
}

OptimalAngles optimal_angles(double eps) {
  check_eps(eps);
  OptimalAngles oa;
  oa.theta_min = eps * kPi;                 // structure collapses into the layer
  oa.c_min = bowl_constant(eps, oa.theta_min);
  oa.theta_max = (1.0 + eps) * kPi;         // structure touches the shell wall
  oa.c_max = bowl_constant(eps, oa.theta_max);
  return oa;
}

std::vector<BowlGridCell> bowl_depth_grid_serial(double eps_lo, double eps_hi, int n_eps,
                                                 double theta_lo, double theta_hi,
                                                 int n_theta) {
  check_eps(eps_lo);
  check_eps(eps_hi);
  if (n_eps < 1 || n_theta < 1) throw std::invalid_argument("grid counts must be positive");
  if (!(theta_lo > 0.0) || theta_hi > 2.0 * kPi || theta_lo > theta_hi) {
    throw std::invalid_argument("rotation angles must lie in (0, 2*pi]");
  }
  std::vector<BowlGridCell> cells(static_cast<size_t>(n_eps) * n_theta);
  const double dth = n_theta > 1 ? (theta_hi - theta_lo) / (n_theta - 1) : 0.0;
  for (int i = 0; i < n_eps; ++i) {
    const double eps =
        n_eps > 1 ? eps_lo + (eps_hi - eps_lo) * i / (n_eps - 1) : eps_lo;
    for (int j = 0; j < n_theta; ++j) {
      const double theta = n_theta > 1 ? theta_lo + dth * j : theta_lo;
      BowlGridCell& cell = cells[static_cast<size_t>(i) * n_theta + j];
      cell.eps = eps;
      cell.theta = theta;
      cell.c = bowl_constant(eps, theta);
      cell.depth_below_layer = std::sqrt(cell.c) - eps;
      const double half = 0.5 * std::max(dth, 1e-9);
      cell.locus = 0;
      if (std::abs(theta - eps * kPi) <= half) cell.locus = 1;
      if (std::abs(theta - (1.0 + eps) * kPi) <= half) cell.locus = 2;
    }
  }
  return cells;
}

std::vector<BowlGridCell> bowl_depth_grid(double eps_lo, double eps_hi, int n_eps,
                                          double theta_lo, double theta_hi, int n_theta,
                                          int jobs) {
  check_eps(eps_lo);
  check_eps(eps_hi);
  if (n_eps < 1 || n_theta < 1) throw std::invalid_argument("grid counts must be positive");
  if (!(theta_lo > 0.0) || theta_hi > 2.0 * kPi || theta_lo > theta_hi) {
    throw std::invalid_argument("rotation angles must lie in (0, 2*pi]");
  }
  std::vector<BowlGridCell> cells(static_cast<size_t>(n_eps) * n_theta);
  const double dth = n_theta > 1 ? (theta_hi - theta_lo) / (n_theta - 1) : 0.0;
  const int total = n_eps * n_theta;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(1, jobs))
#endif
  for (int idx = 0; idx < total; ++idx) {
    const int i = idx / n_theta;
    const int j = idx % n_theta;
    const double eps =
        n_eps > 1 ? eps_lo + (eps_hi - eps_lo) * i / (n_eps - 1) : eps_lo;
    const double theta = n_theta > 1 ? theta_lo + dth * j : theta_lo;
    BowlGridCell& cell = cells[idx];
    cell.eps = eps;
    cell.theta = theta;
    cell.c = bowl_constant(eps, theta);
    cell.depth_below_layer = std::sqrt(cell.c) - eps;
    const double half = 0.5 * std::max(dth, 1e-9);
    cell.locus = 0;
    if (std::abs(theta - eps * kPi) <= half) cell.locus = 1;
    if (std::abs(theta - (1.0 + eps) * kPi) <= half) cell.locus = 2;
  }
  (void)jobs;
  return cells;
}

}  // namespace tumbler
