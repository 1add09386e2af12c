#include "tumbler/trajectory.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace tumbler {

namespace {

constexpr double kPi = std::numbers::pi;

// Squared layer amplitude below which a streamline is the degenerate
// tangency point (the cross-section stagnation point): the in-plane motion
// has amplitude |x1| = sqrt(L^2 + kappa) -> 0 there.
constexpr double kTinyAmplitudeSq = 1e-28;

// Interface band for segment classification.  Stitched states satisfy
// v + delta(u) == 0 exactly (same expression, same operands), so the band
// only has to absorb round-off in caller-supplied states.
constexpr double kInterfaceBand = 1e-14;

// Cross-section of the hemisphere at a station w along the rotation axis.
struct Section {
  double eps;
  double L;  // disk radius sqrt(1 - w^2)

  double delta(double u) const {
    const double arg = L * L - u * u;
    return eps * std::sqrt(arg > 0.0 ? arg : 0.0);
  }
};

// Phase angles are always recovered with atan2 from BOTH in-plane
// coordinates: the one-argument asin form is exact in algebra but loses
// half the significant digits next to the interface (d asin/dx -> inf at
// the endpoints), which would smear every stitched crossing by ~1e-8.

// Which segment solution governs the next stretch of trajectory: +1 layer,
// -1 bulk.  On the interface the travel direction decides: the forward
// flow enters the layer on the upstream (u < 0) side and re-enters the
// bulk on the downstream side; backwards it is the other way around.  The
// tangency point u == 0 belongs to the layer, whose solution holds it
// fixed.
int segment_side(const Section& sec, double u, double v, int dir) {
  const double gap = v + sec.delta(u);
  if (gap > kInterfaceBand) return +1;
  if (gap < -kInterfaceBand) return -1;
  if (dir > 0) return u <= 0.0 ? +1 : -1;
  return u >= 0.0 ? +1 : -1;
}

struct SectionState {
  double u;
  double v;
};

// Advances the in-plane state by `angle` (negative = backwards), appending
// interface crossings as 3-D points reconstructed through `restore`.
template <typename Restore>
SectionState advance_section(const Section& sec, SectionState s, double angle,
                             std::vector<InterfaceCrossing>* crossings, double time_offset,
                             const Restore& restore) {
  const int dir = angle >= 0.0 ? +1 : -1;
  const double total = std::abs(angle);
  double remaining = total;
  const double eps = sec.eps;

  auto record = [&](CrossingKind kind) {
    if (crossings != nullptr) {
      crossings->push_back({time_offset + (total - remaining), kind, restore(s.u, s.v)});
    }
  };

  for (int guard = 0; remaining > 0.0; ++guard) {
    assert(guard < 100000);
    if (segment_side(sec, s.u, s.v, dir) > 0) {
      // Flowing layer: u = A sin(phase), v + delta(u) = eps * A cos(phase),
      // with the phase sweeping [-pi/2, pi/2] at rate 1/eps.
      const double w = (s.v + sec.delta(s.u)) / eps;  // >= 0 inside the layer
      const double amp = std::hypot(s.u, w);
      if (amp * amp <= kTinyAmplitudeSq) break;  // stagnation point: never moves
      const double alpha = std::atan2(s.u, w);
      const double t_seg = dir > 0 ? eps * (0.5 * kPi - alpha) : eps * (alpha + 0.5 * kPi);
      if (remaining < t_seg) {
        const double phase = alpha + dir * remaining / eps;
        s.u = amp * std::sin(phase);
        s.v = -sec.delta(s.u) + eps * amp * std::cos(phase);
        remaining = 0.0;
      } else {
        // Land exactly on the interface at the crossing abscissa.
        s.u = std::clamp(dir > 0 ? amp : -amp, -sec.L, sec.L);
        s.v = -sec.delta(s.u);
        remaining -= t_seg;
        record(CrossingKind::ExitLayer);
      }
    } else {
      // Bulk: clockwise circular arc u = R sin(phi), v = -R cos(phi) with
      // phase phi shrinking at unit rate.
      const double R = std::hypot(s.u, s.v);
      double b2 = (R * R - eps * eps * sec.L * sec.L) / (1.0 - eps * eps);
      if (b2 < 0.0) b2 = 0.0;
      const double b = std::sqrt(b2);  // |abscissa| of the interface crossings
      const double beta = std::atan2(b, sec.delta(b));  // R cos(beta) = delta(b)
      const double phi = std::atan2(s.u, -s.v);
      const double t_seg = dir > 0 ? phi + beta : beta - phi;
      if (remaining < t_seg) {
        const double phase = phi - dir * remaining;
        s.u = R * std::sin(phase);
        s.v = -R * std::cos(phase);
        remaining = 0.0;
      } else {
        s.u = dir > 0 ? -b : b;
        s.v = -sec.delta(s.u);
        remaining -= t_seg;
        record(CrossingKind::EnterLayer);
      }
    }
  }
  return s;
}

Section make_section(const ProtocolParams& params, Axis a, const Point3& pt) {
  const double station = a == Axis::Z ? pt.z : pt.x;
  const double L2 = 1.0 - station * station;
  return {params.eps(a), std::sqrt(L2 > 0.0 ? L2 : 0.0)};
}

SectionState section_state(Axis a, const Point3& pt) {
  return {a == Axis::Z ? pt.x : pt.z, pt.y};
}

// Entry point of the streamline through an in-plane state, or nullopt for
// the degenerate tangency streamline.  `elapsed` is filled only when the
// state sits inside the layer.
struct SectionEntry {
  double x1;
  double y1;
  double elapsed;
};
std::optional<SectionEntry> section_entry(const Section& sec, const SectionState& s) {
  if (segment_side(sec, s.u, s.v, +1) > 0) {
    const double w = (s.v + sec.delta(s.u)) / sec.eps;
    const double amp = std::hypot(s.u, w);
    if (amp * amp <= kTinyAmplitudeSq) return std::nullopt;
    const double alpha = std::atan2(s.u, w);
    return SectionEntry{-amp, -sec.delta(amp), sec.eps * (alpha + 0.5 * kPi)};
  }
  const double R = std::hypot(s.u, s.v);
  double b2 = (R * R - sec.eps * sec.eps * sec.L * sec.L) / (1.0 - sec.eps * sec.eps);
  if (b2 < 0.0) b2 = 0.0;
  const double b = std::sqrt(b2);
  return SectionEntry{-b, -sec.delta(b), 0.0};
}

}  // namespace

Point3 advance_single_axis(const ProtocolParams& params, Axis a, const Point3& pt, double angle,
                           std::vector<InterfaceCrossing>* crossings, double time_offset) {
  params.validate();
  const Point3 p = project_into_hemisphere(pt);
  const Section sec = make_section(params, a, p);
  if (sec.L < 1e-15) return p;  // the section degenerates to a point on the axis
  SectionState s = section_state(a, p);
  const auto restore = [&](double u, double v) -> Point3 {
    return a == Axis::Z ? Point3{u, v, p.z} : Point3{p.x, v, u};
  };
  s = advance_section(sec, s, angle, crossings, time_offset, restore);
  return restore(s.u, s.v);
}

std::optional<EntryPoint> entry_point_from_bulk(const ProtocolParams& params, Axis a,
                                                const Point3& pt) {
  params.validate();
  const Point3 p = project_into_hemisphere(pt);
  const Section sec = make_section(params, a, p);
  const SectionState s = section_state(a, p);
  if (sec.L < 1e-15 || segment_side(sec, s.u, s.v, +1) > 0) {
    throw std::domain_error("entry_point_from_bulk: point is not in the bulk");
  }
  const auto entry = section_entry(sec, s);
  if (!entry) return std::nullopt;
  return EntryPoint{entry->x1, entry->y1};
}

std::optional<LayerEntry> entry_point_from_layer(const ProtocolParams& params, Axis a,
                                                 const Point3& pt) {
  params.validate();
  const Point3 p = project_into_hemisphere(pt);
  const Section sec = make_section(params, a, p);
  const SectionState s = section_state(a, p);
  if (sec.L < 1e-15 || segment_side(sec, s.u, s.v, +1) < 0) {
    throw std::domain_error("entry_point_from_layer: point is not in the flowing layer");
  }
  const auto entry = section_entry(sec, s);
  if (!entry) return std::nullopt;
  return LayerEntry{{entry->x1, entry->y1}, entry->elapsed};
}

std::optional<double> streamline_period(const ProtocolParams& params, Axis a, const Point3& pt) {
  params.validate();
  const Point3 p = project_into_hemisphere(pt);
  const Section sec = make_section(params, a, p);
  if (sec.L < 1e-15) return std::nullopt;  // on the rotation axis: no closed circuit
  const auto entry = section_entry(sec, section_state(a, p));
  if (!entry) return std::nullopt;
  if (std::hypot(entry->x1, entry->y1) < 1e-15) return std::nullopt;
  // -2 asin(x1/R) with x1 = -b, y1 = -delta(b), R^2 = b^2 + delta(b)^2.
  return 2.0 * std::atan2(-entry->x1, -entry->y1) + sec.eps * kPi;
}

}  // namespace tumbler
