#include "tumbler/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tumbler/period_one.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tumbler {

namespace {

// Mean distance of an orbit from a reference point over n full protocol
// iterations (the seed itself is not counted).
double orbit_mean_distance(const ProtocolParams& params, Point3 seed, const Point3& ref,
                           int n_periods, MapOrder order) {
  double sum = 0.0;
  Point3 cur = seed;
  for (int k = 0; k < n_periods; ++k) {
    cur = apply_map(params, cur, order);
    sum += distance(cur, ref);
  }
  return sum / n_periods;
}

struct RayFrame {
  Point3 e_hat;  // unit vector towards the elliptic point
  Point3 u;      // tangent basis
  Point3 w;
};

RayFrame tangent_frame(const Point3& elliptic) {
  RayFrame f;
  f.e_hat = (1.0 / norm(elliptic)) * elliptic;
  const Point3 helper = std::abs(f.e_hat.z) < 0.9 ? Point3{0, 0, 1} : Point3{1, 0, 0};
  Point3 u = cross(f.e_hat, helper);
  f.u = (1.0 / norm(u)) * u;
  f.w = cross(f.e_hat, f.u);
  return f;
}

// Point at geodesic distance s from the elliptic point along tangent
// direction d_hat, staying on the shell of radius r_bar.
Point3 geodesic_seed(const RayFrame& f, double r_bar, const Point3& d_hat, double s) {
  const double a = s / r_bar;
  return r_bar * (std::cos(a) * f.e_hat + std::sin(a) * d_hat);
}

KamRay probe_ray(const ProtocolParams& params, const RayFrame& frame, const Point3& elliptic,
                 double r_bar, double angle, double s_inner, double s_max,
                 double divergence_radius, double s_tol, int n_periods, MapOrder order) {
  KamRay ray;
  ray.angle = angle;
  const Point3 d_hat = std::cos(angle) * frame.u + std::sin(angle) * frame.w;
  const auto metric = [&](double s) {
    const Point3 seed = geodesic_seed(frame, r_bar, d_hat, s);
    if (seed.y >= 0.0) return std::numeric_limits<double>::infinity();
    return orbit_mean_distance(params, seed, elliptic, n_periods, order);
  };
  const double inner = metric(s_inner);
  const double threshold =
      divergence_radius > 0.0 ? divergence_radius : std::max(3.0 * inner, 1e-3);
  if (inner > threshold) {
    // Even the innermost probe escapes (only possible with an explicit
    // threshold); report an empty ray at the tolerance scale.
    ray.s_boundary = 0.0;
    ray.boundary = elliptic;
    ray.converged = true;
    return ray;
  }
  double lo = s_inner;
  double hi = s_inner;
  bool bracketed = false;
  while (hi < s_max) {
    hi = std::min(s_max, 2.0 * hi);
    if (metric(hi) > threshold) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) {
    ray.s_boundary = s_max;
    ray.boundary = geodesic_seed(frame, r_bar, d_hat, s_max);
    ray.converged = false;
    return ray;
  }
  while (hi - lo > s_tol) {
    const double mid = 0.5 * (lo + hi);
    if (metric(mid) > threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  ray.s_boundary = lo;
  ray.boundary = geodesic_seed(frame, r_bar, d_hat, lo);
  ray.converged = true;
  return ray;
}

double ring_diameter(const std::vector<KamRay>& rays) {
  double best = 0.0;
  for (size_t i = 0; i < rays.size(); ++i) {
    for (size_t j = i + 1; j < rays.size(); ++j) {
      best = std::max(best, distance(rays[i].boundary, rays[j].boundary));
    }
  }
  return best;
}

// Shared setup for the island search; returns false when the shell carries
// no elliptic fixed point.
struct IslandSetup {
  Point3 elliptic;
  RayFrame frame;
  double s_inner = 0.0;
  double s_max = 0.0;
};

bool island_setup(const ProtocolParams& params, double r_bar, IslandSetup& out) {
  std::vector<ShellPoint> pts;
  try {
    pts = shell_fixed_points(params, r_bar);
  } catch (const std::domain_error&) {
    return false;
  }
  const ShellPoint* chosen = nullptr;
  for (const ShellPoint& sp : pts) {
    if (sp.stability != StabilityTag::NormallyElliptic) continue;
    if (chosen == nullptr || sp.position.x > chosen->position.x) chosen = &sp;
  }
  if (chosen == nullptr) return false;
  double sep = std::numeric_limits<double>::infinity();
  for (const ShellPoint& sp : pts) {
    if (sp.stability != StabilityTag::NormallyHyperbolic) continue;
    sep = std::min(sep, distance(sp.position, chosen->position));
  }
  if (!std::isfinite(sep)) sep = 0.5 * r_bar;  // no hyperbolic partner to scale by
  out.elliptic = chosen->position;
  out.frame = tangent_frame(chosen->position);
  // The island around the elliptic point is bounded by the separatrices of
  // the neighbouring hyperbolic points, so their separation sets the probe
  // scale: innermost seed well inside, outermost probe just beyond.
  out.s_inner = std::max(1e-4, 0.05 * sep);
  out.s_max = std::min(1.5 * sep, 0.45 * std::numbers::pi * r_bar);
  return true;
}

}  // namespace

SwitchAnalysis analyze_switch(const ProtocolParams& params, const Point3& pt, Axis second) {
  params.validate();
  SwitchAnalysis sa;
  sa.switch_point = project_into_hemisphere(pt);
  const Point3& p = sa.switch_point;
  const double dz = flowing_layer_depth(params.eps_z, p.x, p.z);
  const double dx = flowing_layer_depth(params.eps_x, p.x, p.z);
  sa.in_layer = p.y > -std::max(dz, dx);
  const double eps2 = params.eps(second);
  const double d2 = second == Axis::Z ? dz : dx;
  sa.kappa = (d2 * p.y + 0.5 * p.y * p.y) / (eps2 * eps2);
  const bool in_second_layer = p.y > -d2;
  if (in_second_layer) {
    sa.r_exit_predicted = std::sqrt(std::max(0.0, 1.0 + 2.0 * sa.kappa * (1.0 - eps2 * eps2)));
  } else {
    sa.r_exit_predicted = norm(p);
  }
  return sa;
}

std::optional<RadialEntry> entry_for_bulk_radius(double eps, double r_bulk, double z0) {
  if (!(eps > 0.0) || !(eps <= 0.5)) {
    throw std::invalid_argument("layer depth ratio must lie in (0, 0.5]");
  }
  if (!(r_bulk > 0.0) || !(r_bulk <= 1.0)) {
    throw std::invalid_argument("bulk radius must lie in (0, 1]");
  }
  if (!(std::abs(z0) < 1.0)) {
    throw std::invalid_argument("section offset must lie in (-1, 1)");
  }
  const double e2 = eps * eps;
  const double x2 = (r_bulk * r_bulk - e2) / (1.0 - e2) - z0 * z0;
  if (x2 < 0.0) return std::nullopt;
  RadialEntry re;
  re.x1 = -std::sqrt(x2);
  re.y1 = -eps * std::sqrt((1.0 - r_bulk * r_bulk) / (1.0 - e2));
  return re;
}

std::vector<Point3> seed_transect(const ProtocolParams& params, int count, double r_min,
                                  double r_max) {
  params.validate();
  if (count < 1) throw std::invalid_argument("seed count must be positive");
  if (!(r_min > 0.0) || !(r_max < 1.0) || r_min > r_max) {
    throw std::invalid_argument("seed radii must satisfy 0 < r_min <= r_max < 1");
  }
  const double eps = std::max(params.eps_z, params.eps_x);
  std::vector<Point3> seeds;
  seeds.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
    const double r = r_min + (r_max - r_min) * t;
    if (r <= eps) {
      throw std::domain_error("seed radius does not reach below the flowing layers");
    }
    // Largest arc coordinate g (seed = r*(g, -sqrt(1-2g^2), -g)) that keeps
    // the seed strictly below both interfaces, with a 10% margin.
    const double g_hi2 = (r * r - eps * eps) / (2.0 * r * r * (1.0 - eps * eps));
    const double g_hi = 0.9 * std::sqrt(std::min(g_hi2, 0.499));
    const double g = (0.2 + 0.7 * t) * g_hi;
    seeds.push_back({r * g, -r * std::sqrt(1.0 - 2.0 * g * g), -r * g});
  }
  return seeds;
}

RegionTag protocol_region(const ProtocolParams& params, const Point3& pt) {
  params.validate();
  const double r2 = dot(pt, pt);
  if (pt.y > kRegionTol || r2 > 1.0 + kRadiusSlack) return RegionTag::Outside;
  if (pt.y >= -kRegionTol) return RegionTag::FreeSurfaceBoundary;
  const double dz = flowing_layer_depth(params.eps_z, pt.x, pt.z);
  const double dx = flowing_layer_depth(params.eps_x, pt.x, pt.z);
  const double gap = pt.y + std::max(dz, dx);
  if (gap > kRegionTol) return RegionTag::FlowingLayer;
  if (gap < -kRegionTol) return RegionTag::Bulk;
  return RegionTag::InterfaceBoundary;
}

std::vector<PoincareRecord> run_poincare_serial(const ProtocolParams& params,
                                                const std::vector<Point3>& seeds, int n_periods,
                                                MapOrder order) {
  params.validate();
  if (n_periods < 0) throw std::invalid_argument("period count must be non-negative");
  std::vector<PoincareRecord> records(seeds.size() * (static_cast<size_t>(n_periods) + 1));
  for (size_t s = 0; s < seeds.size(); ++s) {
    Point3 cur = project_into_hemisphere(seeds[s]);
    for (int k = 0; k <= n_periods; ++k) {
      if (k > 0) cur = apply_map(params, cur, order);
      PoincareRecord& rec = records[s * (n_periods + 1) + k];
      rec.seed_id = static_cast<int>(s);
      rec.period = k;
      rec.position = cur;
      rec.r = norm(cur);
      rec.region = protocol_region(params, cur);
    }
  }
  return records;
}

std::vector<PoincareRecord> run_poincare(const ProtocolParams& params,
                                         const std::vector<Point3>& seeds, int n_periods,
                                         MapOrder order, int jobs) {
  params.validate();
  if (n_periods < 0) throw std::invalid_argument("period count must be non-negative");
  std::vector<PoincareRecord> records(seeds.size() * (static_cast<size_t>(n_periods) + 1));
  const int n_seeds = static_cast<int>(seeds.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
#endif
  for (int s = 0; s < n_seeds; ++s) {
    Point3 cur = project_into_hemisphere(seeds[s]);
    for (int k = 0; k <= n_periods; ++k) {
      if (k > 0) cur = apply_map(params, cur, order);
      PoincareRecord& rec = records[static_cast<size_t>(s) * (n_periods + 1) + k];
      rec.seed_id = s;
      rec.period = k;
      rec.position = cur;
      rec.r = norm(cur);
      rec.region = protocol_region(params, cur);
    }
  }
  (void)jobs;
  return records;
}

std::vector<RadialSample> radial_history(const ProtocolParams& params, const Point3& seed,
                                         int n_periods, MapOrder order) {
  params.validate();
  if (n_periods < 0) throw std::invalid_argument("period count must be non-negative");
  std::vector<RadialSample> hist;
  hist.reserve(static_cast<size_t>(n_periods) + 1);
  Point3 cur = project_into_hemisphere(seed);
  for (int k = 0; k <= n_periods; ++k) {
    if (k > 0) cur = apply_map(params, cur, order);
    hist.push_back({k, norm(cur), protocol_region(params, cur) == RegionTag::Bulk});
  }
  return hist;
}

DriftStats drift_statistics(const std::vector<RadialSample>& history) {
  DriftStats st;
  double sum = 0.0;
  const RadialSample* first_bulk = nullptr;
  const RadialSample* last_bulk = nullptr;
  for (size_t i = 0; i < history.size(); ++i) {
    if (history[i].in_bulk) {
      if (first_bulk == nullptr) first_bulk = &history[i];
      last_bulk = &history[i];
    }
    if (i == 0) continue;
    if (history[i - 1].in_bulk && history[i].in_bulk) {
      const double dr = std::abs(history[i].r - history[i - 1].r);
      sum += dr;
      st.max_abs_dr = std::max(st.max_abs_dr, dr);
      ++st.pairs;
    }
  }
  if (st.pairs > 0) st.mean_abs_dr = sum / st.pairs;
  if (first_bulk != nullptr && last_bulk != nullptr) {
    st.net_dr = last_bulk->r - first_bulk->r;
  }
  return st;
}

std::optional<KamRing> kam_island_boundary_serial(const ProtocolParams& params, double r_bar,
                                                  MapOrder order, int n_rays, int n_periods,
                                                  double divergence_radius, double s_tol) {
  if (n_rays < 3) throw std::invalid_argument("need at least three rays");
  IslandSetup setup;
  if (!island_setup(params, r_bar, setup)) return std::nullopt;
  KamRing ring;
  ring.elliptic_point = setup.elliptic;
  ring.r_bar = r_bar;
  ring.rays.resize(n_rays);
  for (int j = 0; j < n_rays; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / n_rays;
    ring.rays[j] = probe_ray(params, setup.frame, setup.elliptic, r_bar, angle, setup.s_inner,
                             setup.s_max, divergence_radius, s_tol, n_periods, order);
  }
  ring.diameter = ring_diameter(ring.rays);
  return ring;
}

std::optional<KamRing> kam_island_boundary(const ProtocolParams& params, double r_bar,
                                           MapOrder order, int n_rays, int n_periods,
                                           double divergence_radius, double s_tol, int jobs) {
  if (n_rays < 3) throw std::invalid_argument("need at least three rays");
  IslandSetup setup;
  if (!island_setup(params, r_bar, setup)) return std::nullopt;
  KamRing ring;
  ring.elliptic_point = setup.elliptic;
  ring.r_bar = r_bar;
  ring.rays.resize(n_rays);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
#endif
  for (int j = 0; j < n_rays; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / n_rays;
    ring.rays[j] = probe_ray(params, setup.frame, setup.elliptic, r_bar, angle, setup.s_inner,
                             setup.s_max, divergence_radius, s_tol, n_periods, order);
  }
  (void)jobs;
  ring.diameter = ring_diameter(ring.rays);
  return ring;
}

std::vector<KamRing> kam_tube_cloud(const ProtocolParams& params,
                                    const std::vector<double>& shells, MapOrder order,
                                    int n_rays, int n_periods, int jobs) {
  std::vector<KamRing> rings;
  rings.reserve(shells.size());
  for (const double r_bar : shells) {
    auto ring = kam_island_boundary(params, r_bar, order, n_rays, n_periods, 0.0, 1e-4, jobs);
    if (ring.has_value()) rings.push_back(std::move(*ring));
  }
  return rings;
}

}  // namespace tumbler
