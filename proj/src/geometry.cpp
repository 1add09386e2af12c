#include "tumbler/geometry.hpp"

#include <numbers>

namespace tumbler {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// In-plane coordinate along the flow direction: x for rotation about z,
// z for rotation about x (the two sections are related by swapping x and z).
double in_plane(Axis a, const Point3& pt) { return a == Axis::Z ? pt.x : pt.z; }

}  // namespace

void ProtocolParams::validate() const {
  if (!(eps_z > 0.0) || eps_z > 0.5 || !(eps_x > 0.0) || eps_x > 0.5) {
    throw std::invalid_argument("layer depth eps must lie in (0, 0.5]");
  }
  if (!(theta_z > 0.0) || theta_z > kTwoPi || !(theta_x > 0.0) || theta_x > kTwoPi) {
    throw std::invalid_argument("rotation angle theta must lie in (0, 2*pi]");
  }
}

double flowing_layer_depth(double eps, double x, double z) {
  const double rho2 = x * x + z * z;
  if (rho2 > 1.0 + kRegionTol) {
    throw std::domain_error("flowing_layer_depth: (x, z) outside the unit disk");
  }
  const double arg = 1.0 - rho2;
  return eps * std::sqrt(arg > 0.0 ? arg : 0.0);
}

RegionTag classify_region(const ProtocolParams& params, Axis a, const Point3& pt) {
  const double r2 = dot(pt, pt);
  if (pt.y > kRegionTol || r2 > 1.0 + kRadiusSlack) return RegionTag::Outside;
  if (pt.y >= -kRegionTol) return RegionTag::FreeSurfaceBoundary;
  const double delta = flowing_layer_depth(params.eps(a), pt.x, pt.z);
  const double gap = pt.y + delta;  // > 0 above the interface
  if (gap > kRegionTol) return RegionTag::FlowingLayer;
  if (gap < -kRegionTol) return RegionTag::Bulk;
  return RegionTag::InterfaceBoundary;
}

double streamfunction(const ProtocolParams& params, Axis a, const Point3& pt) {
  const RegionTag tag = classify_region(params, a, pt);
  if (tag == RegionTag::Outside) {
    throw std::domain_error("streamfunction: point outside the filled hemisphere");
  }
  const double u = in_plane(a, pt);
  const double v = pt.y;
  if (tag == RegionTag::Bulk) {
    return 0.5 * (u * u + v * v);
  }
  // The layer branch also applies on the free surface and interface, where
  // it matches the streamline constants used by the trajectory solution.
  const double eps = params.eps(a);
  const double delta = flowing_layer_depth(eps, pt.x, pt.z);
  return (delta * v + 0.5 * v * v) / (eps * eps);
}

Point3 project_into_hemisphere(const Point3& pt) {
  Point3 p = pt;
  if (p.y > 0.0) {
    if (p.y > kRegionTol) {
      throw std::domain_error("point lies above the free surface");
    }
    p.y = 0.0;
  }
  const double r2 = dot(p, p);
  if (r2 > 1.0) {
    if (r2 > 1.0 + kRadiusSlack) {
      throw std::domain_error("point lies outside the unit sphere");
    }
    const double s = 1.0 / std::sqrt(r2);
    p = s * p;
  }
  return p;
}

}  // namespace tumbler
