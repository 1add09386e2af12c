// Geometry of a half-full spherical tumbler in dimensionless units.
//
// The sphere has unit radius, the free surface is the plane y = 0, and the
// filled half is y <= 0.  While the tumbler rotates about an axis a (either
// z or x), grains flow only inside a thin lens-shaped layer between the free
// surface and the interface
//
//     y = -delta_a(x, z),   delta_a(x, z) = eps_a * sqrt(1 - x^2 - z^2),
//
// and move in solid-body rotation below it.  eps_a in (0, 0.5] is the
// maximal layer depth, attained at the centre of the free surface.
#pragma once

#include <cmath>
#include <stdexcept>

namespace tumbler {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Point3& p) { return std::sqrt(dot(p, p)); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

// Rotation axes of the blinking protocol.
enum class Axis { Z, X };

// Where a point sits relative to one axis' flowing layer.  Tags are
// mutually exclusive; the boundary tags win inside a kRegionTol band.
enum class RegionTag {
  Bulk,                 // below the interface, in solid-body rotation
  FlowingLayer,         // strictly between interface and free surface
  InterfaceBoundary,    // on y = -delta_a(x, z)
  FreeSurfaceBoundary,  // on y = 0
  Outside,              // beyond the hemisphere or above the free surface
};

// Blinking-rotation protocol: rotate by theta_z about z, then by theta_x
// about x, and repeat.  Angles are in radians, measured in flow time (the
// bulk turns with unit angular speed).
struct ProtocolParams {
  double eps_z = 0.15;
  double eps_x = 0.15;
  double theta_z = 3.14159265358979323846;
  double theta_x = 3.14159265358979323846;

  double eps(Axis a) const { return a == Axis::Z ? eps_z : eps_x; }
  double theta(Axis a) const { return a == Axis::Z ? theta_z : theta_x; }
  bool symmetric() const { return eps_z == eps_x; }

  // Throws std::invalid_argument unless eps_a in (0, 0.5] and
  // theta_a in (0, 2*pi].
  void validate() const;
};

// Band inside which a coordinate is treated as sitting on a boundary.
inline constexpr double kRegionTol = 1e-12;

// Points whose squared radius exceeds 1 by at most this much are projected
// radially back onto the sphere; larger overshoots are domain errors.
inline constexpr double kRadiusSlack = 1e-9;

// Layer depth delta(x, z) = eps * sqrt(1 - x^2 - z^2).
// Throws std::domain_error if (x, z) lies outside the unit disk by more
// than kRegionTol.
double flowing_layer_depth(double eps, double x, double z);

// Classifies a point against axis a's layer.  Total: never throws; points
// outside the filled hemisphere return RegionTag::Outside.
RegionTag classify_region(const ProtocolParams& params, Axis a, const Point3& pt);

// Streamfunction of the cross-section flow for rotation about axis a:
//   psi = (1/eps^2) (delta*v + v^2/2)   on and above the interface,
//   psi = (u^2 + v^2)/2                 below it,
// where (u, v) are the in-plane coordinates (u = x for axis z, u = z for
// axis x; v = y).  Constant along trajectories of the respective segment.
// Throws std::domain_error for points classified Outside.
double streamfunction(const ProtocolParams& params, Axis a, const Point3& pt);

// Validates that a point belongs to the filled hemisphere, projecting
// radius overshoots up to kRadiusSlack back onto the sphere and clamping
// y-values inside the kRegionTol band onto the free surface.  Throws
// std::domain_error beyond those bands.
Point3 project_into_hemisphere(const Point3& pt);

}  // namespace tumbler
