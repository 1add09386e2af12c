#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "reference_values.hpp"
#include "support/section_oracle.hpp"
#include "tumbler/trajectory.hpp"

using namespace tumbler;
namespace ref = tumbler::testing;

namespace {
constexpr double kPi = std::numbers::pi;
const ProtocolParams kDefault;  // eps 0.15, theta pi, both axes
}  // namespace

TEST_CASE("bulk seed: entry point and period") {
  const Point3 seed{0.0, -0.5, 0.0};
  const auto entry = entry_point_from_bulk(kDefault, Axis::Z, seed);
  REQUIRE(entry.has_value());
  CHECK(entry->x1 == doctest::Approx(ref::kBulkEntryX1).epsilon(1e-14));
  CHECK(entry->y1 == doctest::Approx(ref::kBulkEntryY1).epsilon(1e-14));

  const auto period = streamline_period(kDefault, Axis::Z, seed);
  REQUIRE(period.has_value());
  CHECK(*period == doctest::Approx(ref::kBulkSeedPeriod).epsilon(1e-14));
}

TEST_CASE("bulk arcs are clockwise circles") {
  const Point3 seed{0.0, -0.5, 0.0};
  const Point3 p1 = advance_single_axis(kDefault, Axis::Z, seed, 1.0);
  CHECK(p1.x == doctest::Approx(ref::kBulkArc1X).epsilon(1e-14));
  CHECK(p1.y == doctest::Approx(ref::kBulkArc1Y).epsilon(1e-14));
  CHECK(p1.z == 0.0);

  const Point3 pq = advance_single_axis(kDefault, Axis::Z, seed, kPi / 4.0);
  CHECK(pq.x == doctest::Approx(ref::kBulkArcQuarterX).epsilon(1e-14));
  CHECK(pq.y == doctest::Approx(ref::kBulkArcQuarterX).epsilon(1e-14));

  // Section radius is invariant while the arc stays in the bulk.
  CHECK(std::hypot(p1.x, p1.y) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("layer seed: virtual entry and remaining transit") {
  const Point3 seed{0.1, -0.05, 0.0};
  const auto le = entry_point_from_layer(kDefault, Axis::Z, seed);
  REQUIRE(le.has_value());
  CHECK(-le->entry.x1 == doctest::Approx(ref::kLayerSeedAmplitude).epsilon(1e-14));
  // elapsed-since-entry plus remaining time must add up to the universal
  // transit time eps*pi.
  CHECK(layer_transit_time(0.15) - le->elapsed ==
        doctest::Approx(ref::kLayerSeedTimeToExit).epsilon(1e-13));

  const Point3 adv = advance_single_axis(kDefault, Axis::Z, seed, 0.1);
  CHECK(adv.x == doctest::Approx(ref::kLayerAdv01X).epsilon(1e-13));
  CHECK(adv.y == doctest::Approx(ref::kLayerAdv01Y).epsilon(1e-13));
}

TEST_CASE("interface crossings and universal layer residence") {
  const Point3 seed{0.0, -0.5, 0.0};
  std::vector<InterfaceCrossing> crossings;
  const Point3 back =
      advance_single_axis(kDefault, Axis::Z, seed, ref::kBulkSeedPeriod, &crossings, 0.0);
  // One full circuit: enter once, exit once, return to the seed.
  REQUIRE(crossings.size() == 2);
  CHECK(crossings[0].kind == CrossingKind::EnterLayer);
  CHECK(crossings[1].kind == CrossingKind::ExitLayer);
  CHECK(crossings[0].time == doctest::Approx(ref::kBulkTimeToEntry).epsilon(1e-13));
  CHECK(crossings[1].time - crossings[0].time ==
        doctest::Approx(layer_transit_time(0.15)).epsilon(1e-13));
  CHECK(distance(back, seed) < 1e-12);
  // The recorded entry position matches the closed-form entry point.
  CHECK(crossings[0].position.x == doctest::Approx(ref::kBulkEntryX1).epsilon(1e-13));
  CHECK(crossings[0].position.y == doctest::Approx(ref::kBulkEntryY1).epsilon(1e-13));

  // Residence time is eps*pi for every streamline, whatever its depth.
  for (const double y0 : {-0.3, -0.55, -0.8, -0.95}) {
    std::vector<InterfaceCrossing> ev;
    advance_single_axis(kDefault, Axis::Z, {0.0, y0, 0.0}, 4.0, &ev, 0.0);
    REQUIRE(ev.size() >= 2);
    CHECK(ev[1].time - ev[0].time == doctest::Approx(layer_transit_time(0.15)).epsilon(1e-12));
  }
}

TEST_CASE("off-centre sections and axis-x symmetry") {
  // Rotation about z never moves the z coordinate (and x for axis x).
  const Point3 seed{0.2, -0.4, 0.3};
  const Point3 pz = advance_single_axis(kDefault, Axis::Z, seed, 2.37);
  CHECK(pz.z == 0.3);
  const Point3 px = advance_single_axis(kDefault, Axis::X, seed, 2.37);
  CHECK(px.x == 0.2);

  // The axis-x advance is the axis-z advance in swapped coordinates.
  const Point3 swapped{seed.z, seed.y, seed.x};
  const Point3 pz2 = advance_single_axis(kDefault, Axis::Z, swapped, 2.37);
  CHECK(px.x == pz2.z);
  CHECK(px.y == pz2.y);
  CHECK(px.z == pz2.x);
}

TEST_CASE("negative angles invert the advance exactly") {
  const std::vector<Point3> seeds = {
      {0.0, -0.5, 0.0},   // crosses the layer mid-advance
      {0.1, -0.05, 0.0},  // starts inside the layer
      {0.2, -0.4, 0.3},   // off-centre section
      {-0.6, -0.3, 0.35},
  };
  for (const Point3& s : seeds) {
    for (const double t : {0.7, 2.0, 3.9}) {
      const Point3 fwd = advance_single_axis(kDefault, Axis::Z, s, t);
      const Point3 rev = advance_single_axis(kDefault, Axis::Z, fwd, -t);
      CHECK(distance(rev, s) < 1e-10);
      const Point3 fwx = advance_single_axis(kDefault, Axis::X, s, t);
      const Point3 rvx = advance_single_axis(kDefault, Axis::X, fwx, -t);
      CHECK(distance(rvx, s) < 1e-10);
    }
  }
}

TEST_CASE("streamfunction is invariant along each segment") {
  // Stay within the bulk: psi = R^2/2 throughout.
  const Point3 s0{0.1, -0.6, 0.2};
  const double psi0 = streamfunction(kDefault, Axis::Z, s0);
  for (const double t : {0.2, 0.5, 0.9}) {
    const Point3 p = advance_single_axis(kDefault, Axis::Z, s0, t);
    CHECK(streamfunction(kDefault, Axis::Z, p) == doctest::Approx(psi0).epsilon(1e-12));
  }
  // Stay within the layer: the layer branch is the invariant.
  const Point3 l0{-0.2, -0.04, 0.1};
  const double psil = streamfunction(kDefault, Axis::Z, l0);
  for (const double t : {0.02, 0.05}) {
    const Point3 p = advance_single_axis(kDefault, Axis::Z, l0, t);
    CHECK(streamfunction(kDefault, Axis::Z, p) == doctest::Approx(psil).epsilon(1e-10));
  }
}

TEST_CASE("degenerate tangency point is a cross-section stagnation point") {
  const Point3 tangency{0.0, -0.15, 0.0};
  CHECK_FALSE(entry_point_from_layer(kDefault, Axis::Z, tangency).has_value());
  CHECK_FALSE(streamline_period(kDefault, Axis::Z, tangency).has_value());
  const Point3 moved = advance_single_axis(kDefault, Axis::Z, tangency, 1.3);
  CHECK(distance(moved, tangency) == 0.0);
  // Same point off-centre: (0, -eps*L, z).
  const double L = std::sqrt(1.0 - 0.25);
  const Point3 tz{0.0, -0.15 * L, 0.5};
  CHECK(distance(advance_single_axis(kDefault, Axis::Z, tz, 0.8), tz) == 0.0);
}

TEST_CASE("free-surface streamline enters at the upstream corner") {
  const Point3 surf{0.3, 0.0, 0.0};
  const auto le = entry_point_from_layer(kDefault, Axis::Z, surf);
  REQUIRE(le.has_value());
  CHECK(le->entry.x1 == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(le->entry.y1 == doctest::Approx(0.0));
}

TEST_CASE("wrong-region queries throw") {
  CHECK_THROWS_AS(entry_point_from_bulk(kDefault, Axis::Z, Point3{0.1, -0.05, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(entry_point_from_layer(kDefault, Axis::Z, Point3{0.0, -0.5, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(advance_single_axis(kDefault, Axis::Z, Point3{0.0, 0.3, 0.0}, 1.0),
                  std::domain_error);
}

TEST_CASE("closed-form advance agrees with the integrated flow") {
  struct Case {
    Point3 seed;
    Axis axis;
    double t;
  };
  const std::vector<Case> cases = {
      {{0.0, -0.5, 0.0}, Axis::Z, 2.0},   // ends inside the layer
      {{0.0, -0.5, 0.0}, Axis::Z, 3.2},   // past one full circuit
      {{0.2, -0.4, 0.3}, Axis::Z, 1.7},   // off-centre section
      {{0.3, -0.35, -0.2}, Axis::X, 2.1},
      {{0.1, -0.05, 0.0}, Axis::Z, 0.6},  // layer seed through exit
  };
  for (const auto& c : cases) {
    const Point3 closed = advance_single_axis(kDefault, c.axis, c.seed, c.t);
    const Point3 integrated = ref::oracle_advance(kDefault, c.axis, c.seed, c.t, 1e-5);
    CAPTURE(c.t);
    CHECK(distance(closed, integrated) < 1e-9);
  }
}
