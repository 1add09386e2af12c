// Invariant manifolds of normally hyperbolic fixed points.
//
// A manifold is grown from a fundamental domain: a short segment
// [X* + (alpha/lambda) E, X* + alpha E] along the relevant eigenvector E,
// whose images under the map (unstable) or its inverse (stable) tile the
// manifold without gaps or overlap.  Each iteration maps the current
// segment and subdivides its pre-image wherever consecutive images drift
// farther than max_gap apart, so sampling density adapts to stretching.
// Connections are detected by watching the traced segments approach other
// fixed points (heteroclinic) or return to the source (homoclinic).
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tumbler/geometry.hpp"
#include "tumbler/map.hpp"

namespace tumbler {

enum class ManifoldKind { Unstable, Stable };
enum class BranchSign { Plus, Minus };

struct NotHyperbolic : std::domain_error {
  using std::domain_error::domain_error;
};
struct AlphaTooLarge : std::domain_error {
  using std::domain_error::domain_error;
};

struct FundamentalDomain {
  Point3 fixed_point;
  Point3 direction;       // unit eigenvector, oriented by branch
  double alpha = 1e-4;
  double ratio = 0.0;     // expansion per iteration along the manifold (>1)
  ManifoldKind kind = ManifoldKind::Unstable;
  std::vector<Point3> points;  // geometric ladder from alpha/ratio to alpha
};

// Builds the fundamental domain at a fixed point.  The point is polished
// first and must be normally hyperbolic (NotHyperbolic otherwise); alpha
// must be small enough that the map is linear along the domain to within
// curvature_tol*alpha (AlphaTooLarge otherwise).
FundamentalDomain make_fundamental_domain(const ProtocolParams& params, const Point3& fixed_pt,
                                          ManifoldKind kind, BranchSign branch,
                                          MapOrder order = MapOrder::ZFirst, double alpha = 1e-4,
                                          int n_points = 64, double curvature_tol = 0.05);

struct ManifoldTrace {
  std::vector<Point3> polyline;       // ordered along the manifold
  std::vector<size_t> period_begin;   // polyline index where each period's segment starts
  bool truncated = false;             // stopped by max_points before n_periods
};

// Grows the manifold for n_periods iterations (point budget max_points).
ManifoldTrace trace_manifold(const ProtocolParams& params, const FundamentalDomain& domain,
                             MapOrder order = MapOrder::ZFirst, int n_periods = 30,
                             double max_gap = 5e-3, size_t max_points = 200000);

enum class ConnectionKind { None, Heteroclinic, Homoclinic };

struct ConnectionResult {
  ConnectionKind kind = ConnectionKind::None;
  int target_index = -1;      // into the caller's target list
  double distance = 0.0;      // closest approach to that target
  int period = 0;             // iteration at which it occurred
  Point3 approach_point;
};

// Traces the manifold and reports the first target approached within tol.
// Approaches to the source fixed point only count after the trace has left
// an arming radius, so the trivial initial proximity is ignored; a
// connection back to the source is Homoclinic, to any other target
// Heteroclinic.  If nothing comes within tol the result carries the overall
// closest approach with kind None.
ConnectionResult detect_connection(const ProtocolParams& params, const FundamentalDomain& domain,
                                   const std::vector<Point3>& targets,
                                   MapOrder order = MapOrder::ZFirst, double tol = 1e-4,
                                   int n_periods = 100, double max_gap = 5e-3,
                                   size_t max_points = 400000, double arm_radius = 0.05);

}  // namespace tumbler
