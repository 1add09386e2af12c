// Radial transport diagnostics for the blinking protocol.
//
// With equal layer depths on both axes the composed dynamics confine every
// tracer to the hemispherical shell through its seed; radial transport
// switches on only when the depths differ AND the tracer is caught inside a
// flowing layer at the instant the rotation axis switches.  The routines
// here quantify that mechanism: per-switch exit-radius predictions,
// Poincare sections sampled once per protocol iteration, per-period radial
// histories, and KAM island boundaries on individual shells.
#pragma once

#include <optional>
#include <vector>

#include "tumbler/geometry.hpp"
#include "tumbler/map.hpp"

namespace tumbler {

// State of a tracer at the instant the protocol switches from the first
// rotation to the second.  kappa is the streamline constant of the SECOND
// rotation's layer through the switch point; when the point sits inside
// that layer the tracer leaves it onto the bulk shell of radius
//   r_exit = sqrt(1 + 2*kappa*(1 - eps2^2)),
// otherwise the second rotation keeps the current radius.
struct SwitchAnalysis {
  Point3 switch_point;
  bool in_layer = false;          // inside either axis' flowing layer
  double kappa = 0.0;
  double r_exit_predicted = 0.0;
};

// Total over the filled hemisphere.  `second` names the axis about to
// rotate (the protocol's second axis: X when the order is ZFirst).
SwitchAnalysis analyze_switch(const ProtocolParams& params, const Point3& pt,
                              Axis second = Axis::X);

// Interface entry point of the streamline on the bulk shell of radius
// r_bulk in the section z = z0 (axis-z rotation, in-plane coordinates):
//   x1 = -sqrt((r^2 - eps^2)/(1 - eps^2) - z0^2),
//   y1 = -eps * sqrt((1 - r^2)/(1 - eps^2)).
// std::nullopt when the shell does not reach the layer in that section.
struct RadialEntry {
  double x1 = 0.0;
  double y1 = 0.0;
};
std::optional<RadialEntry> entry_for_bulk_radius(double eps, double r_bulk, double z0);

// Deterministic seed family along the transect z = -x: seed i sits on the
// shell of radius lerp(r_min, r_max, i/(n-1)) with its arc position swept
// across the bulk portion of the transect.  All seeds are strictly inside
// the bulk for both axes.
std::vector<Point3> seed_transect(const ProtocolParams& params, int count, double r_min,
                                  double r_max);

// Region of a point with respect to the whole protocol: Bulk only if below
// both axes' interfaces (the radius is then a streamline invariant for
// either rotation); FlowingLayer if inside at least one layer.
RegionTag protocol_region(const ProtocolParams& params, const Point3& pt);

// One Poincare record: the state after `period` full protocol iterations.
struct PoincareRecord {
  int seed_id = 0;
  int period = 0;
  Point3 position;
  double r = 0.0;
  RegionTag region = RegionTag::Bulk;
};

// Iterates every seed n_periods times and records each iteration (plus the
// seed itself as period 0), ordered by (seed_id, period).  The OpenMP
// variant shards seeds across jobs threads; per-seed arithmetic is
// identical, so both produce bitwise-equal records.
std::vector<PoincareRecord> run_poincare(const ProtocolParams& params,
                                         const std::vector<Point3>& seeds, int n_periods,
                                         MapOrder order = MapOrder::ZFirst, int jobs = 1);
std::vector<PoincareRecord> run_poincare_serial(const ProtocolParams& params,
                                                const std::vector<Point3>& seeds, int n_periods,
                                                MapOrder order = MapOrder::ZFirst);

// Bulk radius per protocol iteration for one seed.  in_bulk marks records
// whose point is below both interfaces; only those radii are meaningful
// shell coordinates.
struct RadialSample {
  int period = 0;
  double r = 0.0;
  bool in_bulk = false;
};
std::vector<RadialSample> radial_history(const ProtocolParams& params, const Point3& seed,
                                         int n_periods, MapOrder order = MapOrder::ZFirst);

// Drift statistics over consecutive bulk-tagged samples.
struct DriftStats {
  double mean_abs_dr = 0.0;  // mean |r_{n+1} - r_n| per period
  double max_abs_dr = 0.0;
  double net_dr = 0.0;       // r_last - r_first over bulk samples
  int pairs = 0;             // number of consecutive bulk pairs
};
DriftStats drift_statistics(const std::vector<RadialSample>& history);

// One ray of a KAM island boundary search, and the assembled ring.
struct KamRay {
  double angle = 0.0;       // direction in the shell's tangent plane
  double s_boundary = 0.0;  // geodesic distance of the boundary seed
  Point3 boundary;          // last seed that stays near the elliptic point
  bool converged = false;   // bracketed and bisected to tolerance
};
struct KamRing {
  Point3 elliptic_point;
  double r_bar = 0.0;
  std::vector<KamRay> rays;
  double diameter = 0.0;  // max pairwise distance between boundary points
};

// Boundary of the KAM island around a shell's elliptic fixed point, probed
// along geodesic rays: a seed belongs to the island while its average
// distance from the elliptic point over n_periods iterations stays below
// divergence_radius (pass 0 to use 3x the innermost seed's average, per
// ray).  Boundary localised to s_tol by bisection.  std::nullopt when the
// shell has no elliptic point.
std::optional<KamRing> kam_island_boundary(const ProtocolParams& params, double r_bar,
                                           MapOrder order = MapOrder::ZFirst, int n_rays = 32,
                                           int n_periods = 200, double divergence_radius = 0.0,
                                           double s_tol = 1e-4, int jobs = 1);
std::optional<KamRing> kam_island_boundary_serial(const ProtocolParams& params, double r_bar,
                                                  MapOrder order = MapOrder::ZFirst,
                                                  int n_rays = 32, int n_periods = 200,
                                                  double divergence_radius = 0.0,
                                                  double s_tol = 1e-4);

// Island boundaries across a stack of shells (shells without an elliptic
// point are skipped).  Together the rings sample the KAM tube.
std::vector<KamRing> kam_tube_cloud(const ProtocolParams& params,
                                    const std::vector<double>& shells,
                                    MapOrder order = MapOrder::ZFirst, int n_rays = 32,
                                    int n_periods = 200, int jobs = 1);

}  // namespace tumbler
