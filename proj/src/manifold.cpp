#include "tumbler/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace tumbler {

namespace {

Point3 map_step(const ProtocolParams& params, const Point3& pt, ManifoldKind kind,
                MapOrder order) {
  return kind == ManifoldKind::Unstable ? apply_map(params, pt, order)
                                        : apply_inverse_map(params, pt, order);
}

// Deterministic sign convention: the largest-magnitude component positive.
Point3 canonical_direction(const Point3& v) {
  const double ax = std::abs(v.x), ay = std::abs(v.y), az = std::abs(v.z);
  double lead = v.x;
  if (ay > ax && ay >= az) {
    lead = v.y;
  } else if (az > ax && az > ay) {
    lead = v.z;
  }
  return lead < 0.0 ? -1.0 * v : v;
}

// Grows one period of the manifold: maps `pre` and subdivides its chords
// wherever consecutive images separate beyond max_gap.  Appends the refined
// images (including the image of pre.front()) to `out`; returns false when
// the point budget ran out mid-way.
bool advance_segment(const ProtocolParams& params, const std::vector<Point3>& pre,
                     ManifoldKind kind, MapOrder order, double max_gap, size_t budget,
                     std::vector<Point3>& out) {
  struct Node {
    Point3 pre;
    Point3 img;
  };
  bool within_budget = true;
  const auto subdivide = [&](const Node& a, const Node& b, auto&& self, int depth) -> void {
    if (out.size() >= budget) {
      within_budget = false;
      out.push_back(b.img);
      return;
    }
    if (distance(a.img, b.img) <= max_gap || depth >= 24) {
      out.push_back(b.img);
      return;
    }
    Node mid;
    mid.pre = 0.5 * (a.pre + b.pre);
    mid.img = map_step(params, mid.pre, kind, order);
    self(a, mid, self, depth + 1);
    self(mid, b, self, depth + 1);
  };
  Node prev{pre.front(), map_step(params, pre.front(), kind, order)};
  out.push_back(prev.img);
  for (size_t i = 1; i < pre.size(); ++i) {
    Node next{pre[i], map_step(params, pre[i], kind, order)};
    subdivide(prev, next, subdivide, 0);
    prev = next;
  }
  return within_budget;
}

}  // namespace

FundamentalDomain make_fundamental_domain(const ProtocolParams& params, const Point3& fixed_pt,
                                          ManifoldKind kind, BranchSign branch, MapOrder order,
                                          double alpha, int n_points, double curvature_tol) {
  params.validate();
  if (n_points < 2) throw std::invalid_argument("fundamental domain needs at least two points");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");

  const Point3 x_star = newton_polish_fixed_point(params, fixed_pt, order);
  const double residual = distance(apply_map(params, x_star, order), x_star);
  if (residual > 1e-8) {
    throw std::domain_error("seed does not polish to a fixed point of the composed map");
  }

  const EigenSystem es = eigen_3x3(jacobian_fd(params, x_star, 1e-6, order));
  if (classify_spectrum(es) != StabilityTag::NormallyHyperbolic) {
    throw NotHyperbolic("fixed point is not normally hyperbolic");
  }
  // Identify the transverse pair: skip the eigenvalue closest to 1 (tangent
  // to the curve of fixed points), then split by magnitude.
  int tangent = 0;
  double best = std::abs(es.values[0] - std::complex<double>{1.0, 0.0});
  for (int k = 1; k < 3; ++k) {
    const double d = std::abs(es.values[k] - std::complex<double>{1.0, 0.0});
    if (d < best) {
      best = d;
      tangent = k;
    }
  }
  int i_unstable = -1, i_stable = -1;
  for (int k = 0; k < 3; ++k) {
    if (k == tangent) continue;
    if (i_unstable < 0) {
      i_unstable = k;
    } else {
      i_stable = k;
    }
  }
  if (std::abs(es.values[i_unstable]) < std::abs(es.values[i_stable])) {
    std::swap(i_unstable, i_stable);
  }
  const int idx = kind == ManifoldKind::Unstable ? i_unstable : i_stable;
  const std::complex<double> lambda = es.values[idx];
  if (std::abs(lambda.imag()) > 1e-8 || lambda.real() <= 0.0) {
    throw NotHyperbolic("transverse eigenvalue is not real and positive");
  }

  FundamentalDomain dom;
  dom.fixed_point = x_star;
  dom.kind = kind;
  dom.alpha = alpha;
  dom.ratio =
      kind == ManifoldKind::Unstable ? lambda.real() : 1.0 / lambda.real();
  if (dom.ratio <= 1.0 + 1e-6) {
    throw NotHyperbolic("transverse eigenvalue too close to the unit circle");
  }
  Point3 dir{es.vectors[idx][0].real(), es.vectors[idx][1].real(), es.vectors[idx][2].real()};
  const double n = norm(dir);
  if (n < 1e-12) throw NotHyperbolic("eigenvector is numerically defective");
  dir = canonical_direction((1.0 / n) * dir);
  dom.direction = branch == BranchSign::Plus ? dir : -1.0 * dir;

  // Linearity check: one expansion step along the domain must match the
  // eigen prediction to within curvature_tol * alpha.
  const Point3 tip = x_star + alpha * dom.direction;
  if (dot(tip, tip) > 1.0 || tip.y > 0.0) {
    throw AlphaTooLarge("fundamental domain leaves the hemisphere");
  }
  const Point3 image = map_step(params, tip, kind, order);
  const Point3 predicted = x_star + (dom.ratio * alpha) * dom.direction;
  if (distance(image, predicted) > curvature_tol * alpha) {
    throw AlphaTooLarge("map is not linear across the fundamental domain; reduce alpha");
  }

  dom.points.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double expo = static_cast<double>(i) / (n_points - 1) - 1.0;
    const double s = alpha * std::pow(dom.ratio, expo);
    dom.points.push_back(x_star + s * dom.direction);
  }
  return dom;
}

ManifoldTrace trace_manifold(const ProtocolParams& params, const FundamentalDomain& domain,
                             MapOrder order, int n_periods, double max_gap, size_t max_points) {
  ManifoldTrace trace;
  trace.polyline = domain.points;
  trace.period_begin.push_back(0);
  std::vector<Point3> segment = domain.points;
  for (int k = 0; k < n_periods; ++k) {
    std::vector<Point3> next;
    const size_t room = max_points > trace.polyline.size()
                            ? max_points - trace.polyline.size()
                            : 0;
    if (room == 0) {
      trace.truncated = true;
      break;
    }
    const bool ok =
        advance_segment(params, segment, domain.kind, order, max_gap, room, next);
    trace.period_begin.push_back(trace.polyline.size());
    trace.polyline.insert(trace.polyline.end(), next.begin(), next.end());
    segment = std::move(next);
    if (!ok) {
      trace.truncated = true;
      break;
    }
  }
  return trace;
}

ConnectionResult detect_connection(const ProtocolParams& params, const FundamentalDomain& domain,
                                   const std::vector<Point3>& targets, MapOrder order,
                                   double tol, int n_periods, double max_gap,
                                   size_t max_points, double arm_radius) {
  ConnectionResult result;
  result.distance = std::numeric_limits<double>::infinity();
  if (targets.empty()) return result;

  std::vector<bool> is_source(targets.size());
  for (size_t j = 0; j < targets.size(); ++j) {
    is_source[j] = distance(targets[j], domain.fixed_point) < 1e-10;
  }

  bool armed = false;
  size_t used = domain.points.size();
  std::vector<Point3> segment = domain.points;
  for (int k = 1; k <= n_periods; ++k) {
    std::vector<Point3> next;
    const size_t room = max_points > used ? max_points - used : 0;
    if (room == 0) break;
    const bool ok = advance_segment(params, segment, domain.kind, order, max_gap, room, next);
    for (const Point3& p : next) {
      for (size_t j = 0; j < targets.size(); ++j) {
        if (is_source[j] && !armed) continue;  // still inside the arming radius
        const double d = distance(p, targets[j]);
        if (d < result.distance) {
          result.distance = d;
          result.target_index = static_cast<int>(j);
          result.period = k;
          result.approach_point = p;
        }
        if (d < tol) {
          result.kind =
              is_source[j] ? ConnectionKind::Homoclinic : ConnectionKind::Heteroclinic;
          return result;
        }
      }
      if (!armed && distance(p, domain.fixed_point) > arm_radius) armed = true;
    }
    used += next.size();
    segment = std::move(next);
    if (!ok) break;
  }
  return result;
}

}  // namespace tumbler
