// Closed-form advance of a tracer through one single-axis rotation.
//
// In the cross-section at a fixed station along the rotation axis the flow
// decomposes into two exactly solvable segments:
//
//   bulk:  a clockwise circular arc about the section centre,
//   layer: x(t) = |x1| sin(t/eps - pi/2 + phase), with the depth recovered
//          from the layer streamfunction,
//
// where x1 < 0 is the abscissa at which the streamline enters the layer.
// The advance routine stitches these segments, placing the state exactly
// onto the interface y = -delta(x) at every crossing so that round-off
// cannot accumulate over long protocol runs.  Every streamline that enters
// the layer spends exactly eps*pi there per circuit, independent of depth.
#pragma once

#include <optional>
#include <vector>

#include "tumbler/geometry.hpp"

namespace tumbler {

enum class CrossingKind { EnterLayer, ExitLayer };

// One interface crossing recorded during an advance.  Times are measured
// in rotation angle from the start of the advance (plus any caller-supplied
// offset); positions are full 3-D points.
struct InterfaceCrossing {
  double time = 0.0;
  CrossingKind kind = CrossingKind::EnterLayer;
  Point3 position;
};

// Advances a point of the filled hemisphere through a rotation of
// `angle` radians about the given axis.  Negative angles run the flow
// backwards (exact inverse of the forward advance).  If `crossings` is
// non-null every interface crossing is appended with its absolute time
// `time_offset + elapsed`.  Throws std::domain_error for points outside
// the filled hemisphere (after the kRadiusSlack projection).
Point3 advance_single_axis(const ProtocolParams& params, Axis a, const Point3& pt,
                           double angle, std::vector<InterfaceCrossing>* crossings = nullptr,
                           double time_offset = 0.0);

// Upstream interface point (x1, y1) of a streamline, in in-plane
// coordinates (u = x for axis z, u = z for axis x; v = y).
struct EntryPoint {
  double x1 = 0.0;
  double y1 = 0.0;
};

// Entry point of the streamline through a bulk point: where it will cross
// into the flowing layer.  Returns std::nullopt only for the degenerate
// streamline tangent to the interface (cross-section stagnation point).
// Throws std::domain_error if the point is not in the bulk of axis a.
std::optional<EntryPoint> entry_point_from_bulk(const ProtocolParams& params, Axis a,
                                                const Point3& pt);

// Entry point of the streamline through a layer point, together with the
// time elapsed since the streamline crossed it.  For streamlines on the
// free surface the entry point is the upstream corner (-L, 0).  Returns
// std::nullopt for the degenerate tangency streamline.  Throws
// std::domain_error if the point is not in axis a's layer.
struct LayerEntry {
  EntryPoint entry;
  double elapsed = 0.0;
};
std::optional<LayerEntry> entry_point_from_layer(const ProtocolParams& params, Axis a,
                                                 const Point3& pt);

// Period of the closed streamline through a point:
//   T = -2 asin(x1 / sqrt(x1^2 + y1^2)) + eps*pi.
// std::nullopt for the degenerate tangency streamline.
std::optional<double> streamline_period(const ProtocolParams& params, Axis a, const Point3& pt);

// Time any streamline spends inside the flowing layer per circuit.
inline double layer_transit_time(double eps) { return eps * 3.14159265358979323846; }

}  // namespace tumbler
