// The blinking-rotation map and its linearisation.
//
// One protocol iteration advances a point through a rotation about one axis
// and then the other; iterating it generates the discrete dynamics whose
// invariant structures (period-one curves, KAM tubes, manifolds) the rest
// of the library computes.  The map is volume preserving, so the Jacobian
// determinant is 1 wherever the map is differentiable.  It is continuous
// everywhere but not differentiable on the measure-zero set of states whose
// trajectory grazes the layer interface, which is why the finite-difference
// Jacobian refuses stencils that straddle the interface.
#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include "tumbler/geometry.hpp"

namespace tumbler {

// Which rotation acts first within one protocol iteration.
enum class MapOrder { ZFirst, XFirst };

// One full protocol iteration.
Point3 apply_map(const ProtocolParams& params, const Point3& pt, MapOrder order = MapOrder::ZFirst);

// Exact inverse of apply_map (reversed rotations in reversed order).
Point3 apply_inverse_map(const ProtocolParams& params, const Point3& pt,
                         MapOrder order = MapOrder::ZFirst);

// Iterates apply_map n times; returns n+1 points including the seed.
std::vector<Point3> iterate_map(const ProtocolParams& params, const Point3& seed, int n,
                                MapOrder order = MapOrder::ZFirst);

struct Mat3 {
  std::array<std::array<double, 3>, 3> a{};  // row-major
};

// Raised by jacobian_fd when the 6-point stencil cannot be trusted.
struct StencilError : std::domain_error {
  enum class Kind {
    OutsideDomain,        // a stencil point leaves the filled hemisphere
    StraddlesInterface,   // stencil spans both sides of a layer interface
  };
  StencilError(Kind k, const char* msg) : std::domain_error(msg), kind(k) {}
  Kind kind;
};

// Central-difference Jacobian of apply_map with step h (6 map evaluations).
// The stencil must lie inside the filled hemisphere and entirely on one
// side of each axis' layer interface; otherwise a one-sided slope would be
// silently averaged across the non-differentiable set, so StencilError is
// raised instead.
Mat3 jacobian_fd(const ProtocolParams& params, const Point3& pt, double h = 1e-6,
                 MapOrder order = MapOrder::ZFirst);

// Eigenvalues and eigenvectors of a real 3x3 matrix via the characteristic
// cubic (closed form plus one Newton polish per root); vectors[i] belongs
// to values[i].  Eigenvectors of a (numerically) defective matrix are not
// meaningful and come back as zero vectors.
struct EigenSystem {
  std::array<std::complex<double>, 3> values{};
  std::array<std::array<std::complex<double>, 3>, 3> vectors{};
};
EigenSystem eigen_3x3(const Mat3& m);

// Linear stability of a period-one point.  The spectrum of a fixed point
// always contains an eigenvalue 1 (tangent to the period-one curve); the
// remaining pair is either real reciprocal (normally hyperbolic), complex
// conjugate on the unit circle (normally elliptic), or unity (parabolic).
enum class StabilityTag { NormallyHyperbolic, NormallyElliptic, Parabolic, NonFixed };

// Classifies an eigenvalue triple.  unit_tol separates the reciprocal pair
// from the degenerate 1,1 pair; imag_tol decides when the pair counts as
// genuinely complex.
StabilityTag classify_spectrum(const EigenSystem& es, double unit_tol = 1e-4,
                               double imag_tol = 1e-5);

// classify_spectrum on the finite-difference Jacobian, but first rejects
// points that do not return to themselves within residual_tol as NonFixed.
StabilityTag classify_fixed_point(const ProtocolParams& params, const Point3& pt,
                                  MapOrder order = MapOrder::ZFirst,
                                  double residual_tol = 1e-7);

// Refines an approximate fixed point with damped Newton iterations on
// apply_map(pt) - pt (finite-difference Jacobian).  Returns the iterate
// with the smallest residual; callers that need a guarantee should check
// the residual themselves.
Point3 newton_polish_fixed_point(const ProtocolParams& params, const Point3& pt,
                                 MapOrder order = MapOrder::ZFirst, double tol = 1e-12,
                                 int max_iter = 12);

}  // namespace tumbler
