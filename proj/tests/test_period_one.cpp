#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "reference_values.hpp"
#include "tumbler/map.hpp"
#include "tumbler/period_one.hpp"
#include "tumbler/trajectory.hpp"

using namespace tumbler;
namespace ref = tumbler::testing;

namespace {
constexpr double kPi = std::numbers::pi;
const ProtocolParams kDefault;  // eps 0.15, theta pi, both axes

ProtocolParams unequal_angles() {
  ProtocolParams p;
  p.theta_x = 19.0 * kPi / 20.0;
  return p;
}
}  // namespace

TEST_CASE("bowl and cap constants match the frozen references") {
  CHECK(bowl_constant(0.15, kPi) == doctest::Approx(ref::kBowlC_015_pi).epsilon(1e-15));
  CHECK(std::sqrt(bowl_constant(0.15, kPi)) ==
        doctest::Approx(ref::kSqrtBowlC_015_pi).epsilon(1e-15));
  CHECK(cap_constant(0.15, kPi) == doctest::Approx(ref::kCapD_015_pi).epsilon(1e-15));
  CHECK(bowl_constant(0.15, 19.0 * kPi / 20.0) ==
        doctest::Approx(ref::kBowlC_015_19pi20).epsilon(1e-15));
  // Monotone growth of the bowl radius with rotation angle on the genuine range.
  CHECK(bowl_constant(0.15, 0.6) < bowl_constant(0.15, 1.8));
  CHECK_THROWS_AS(bowl_constant(0.0, kPi), std::invalid_argument);
  CHECK_THROWS_AS(cap_constant(0.6, kPi), std::invalid_argument);
}

TEST_CASE("bowl points are period-one streamlines of both rotations") {
  // On the deep branch the streamline period of each single-axis rotation
  // equals that axis' rotation angle, which is what makes the composed map
  // fix the point.
  const double c = bowl_constant(0.15, kPi);
  const double xz = 0.25;
  const double y = -std::sqrt(c - (1.0 + c) * xz * xz);
  const Point3 pt{xz, y, xz};

  const auto tz = streamline_period(kDefault, Axis::Z, pt);
  const auto tx = streamline_period(kDefault, Axis::X, pt);
  REQUIRE(tz.has_value());
  REQUIRE(tx.has_value());
  CHECK(*tz == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(*tx == doctest::Approx(kPi).epsilon(1e-12));

  CHECK(distance(apply_map(kDefault, pt), pt) < 1e-9);
  CHECK(distance(apply_map(kDefault, pt, MapOrder::XFirst), pt) < 1e-9);
}

TEST_CASE("every sampled curve point is fixed under the composed map") {
  const auto samples = sample_period_one_curves(kDefault, 2000);
  REQUIRE(samples.size() > 100);
  int bowl_count = 0;
  int cap_count = 0;
  for (const auto& s : samples) {
    CAPTURE(s.position.x);
    CAPTURE(s.position.z);
    CHECK(distance(apply_map(kDefault, s.position), s.position) < 1e-9);
    const double dz = flowing_layer_depth(kDefault.eps_z, s.position.x, s.position.z);
    const double dx = flowing_layer_depth(kDefault.eps_x, s.position.x, s.position.z);
    if (s.branch == CurveBranch::BulkBowl) {
      ++bowl_count;
      CHECK(s.position.y <= -std::max(dz, dx) + 1e-9);
    } else {
      ++cap_count;
      CHECK(s.position.y >= -std::max(dz, dx) - 1e-9);
      CHECK(s.position.y <= 1e-12);
    }
    // Normal stability from the quadrant sign rule.
    const double prod = s.position.x * s.position.z;
    if (prod > kParabolicTol) {
      CHECK(s.stability == StabilityTag::NormallyHyperbolic);
    } else if (prod < -kParabolicTol) {
      CHECK(s.stability == StabilityTag::NormallyElliptic);
    } else {
      CHECK(s.stability == StabilityTag::Parabolic);
    }
  }
  CHECK(bowl_count > 100);
  CHECK(cap_count > 100);
}

TEST_CASE("layer branch reaches the frozen cap landmarks") {
  // The cap apex sits at (0, -eps*d, 0) and is itself a fixed point.
  const Point3 apex{0.0, ref::kCapApexY_015_pi, 0.0};
  CHECK(distance(apply_map(kDefault, apex), apex) < 1e-9);

  const auto samples = sample_period_one_curves(kDefault, 2000);
  double best = 1e9;
  Point3 nearest{};
  double max_z = 0.0;
  for (const auto& s : samples) {
    if (s.branch != CurveBranch::LayerCap) continue;
    max_z = std::max(max_z, std::abs(s.position.z));
    const double d = std::hypot(s.position.x - 0.1, s.position.z - 0.1);
    if (d < best) {
      best = d;
      nearest = s.position;
    }
  }
  // A sample lands close to the reference section x = z = 0.1 and its depth
  // matches the frozen value there.
  REQUIRE(best < 5e-3);
  CHECK(nearest.y == doctest::Approx(ref::kCapSampleZ01Y).epsilon(5e-3));
  // The cap curve extends exactly to the frozen outermost z.
  CHECK(max_z == doctest::Approx(ref::kCapCurveZMax).epsilon(5e-3));
}

TEST_CASE("no curve exists for rotation angles below the shortest period") {
  ProtocolParams p;
  p.theta_z = 0.2;  // below eps*pi = 0.471
  p.theta_x = 0.2;
  CHECK(sample_period_one_curves(p, 400).empty());
  CHECK_THROWS_AS(shell_existence_window(p), std::domain_error);
}

TEST_CASE("existence window for the symmetric protocol") {
  const ExistenceWindow w = shell_existence_window(kDefault);
  CHECK(w.r_lo == doctest::Approx(ref::kWindowLo_015_pi).epsilon(1e-14));
  CHECK(w.r_hi == doctest::Approx(ref::kWindowHi_015_pi).epsilon(1e-14));
  CHECK(w.r_lo < w.r_hi);
}

TEST_CASE("shell fixed points inside, at, and outside the window") {
  // Inside: four points, alternating stability with the sign of x*z.
  const auto pts = shell_fixed_points(kDefault, 0.62);
  REQUIRE(pts.size() == 4);
  int hyp = 0, ell = 0;
  for (const auto& p : pts) {
    CHECK(std::abs(p.position.x) == doctest::Approx(ref::kShell062X).epsilon(1e-14));
    CHECK(std::abs(p.position.z) == doctest::Approx(ref::kShell062X).epsilon(1e-14));
    CHECK(p.position.y == doctest::Approx(ref::kShell062Y).epsilon(1e-14));
    CHECK(norm(p.position) == doctest::Approx(0.62).epsilon(1e-13));
    CHECK(distance(apply_map(kDefault, p.position), p.position) < 1e-9);
    if (p.stability == StabilityTag::NormallyHyperbolic) ++hyp;
    if (p.stability == StabilityTag::NormallyElliptic) ++ell;
    const double prod = p.position.x * p.position.z;
    CHECK((prod > 0.0) == (p.stability == StabilityTag::NormallyHyperbolic));
  }
  CHECK(hyp == 2);
  CHECK(ell == 2);

  // At the lower edge the four points coalesce into one parabolic point.
  const ExistenceWindow w = shell_existence_window(kDefault);
  const auto edge = shell_fixed_points(kDefault, w.r_lo);
  REQUIRE(edge.size() == 1);
  CHECK(edge[0].stability == StabilityTag::Parabolic);
  CHECK(edge[0].position.x == 0.0);
  CHECK(edge[0].position.z == 0.0);

  // Outside: nothing.
  CHECK(shell_fixed_points(kDefault, 0.35).empty());
  CHECK(shell_fixed_points(kDefault, 0.90).empty());
  CHECK_THROWS_AS(shell_fixed_points(kDefault, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(shell_fixed_points(kDefault, 1.5), std::invalid_argument);
}

TEST_CASE("unequal rotation angles shift the window and the shell points") {
  const ProtocolParams p = unequal_angles();
  const ExistenceWindow w = shell_existence_window(p);
  CHECK(w.r_lo == doctest::Approx(ref::kWindow2Lo).epsilon(1e-14));
  CHECK(w.r_hi == doctest::Approx(ref::kWindow2Hi).epsilon(1e-14));

  const auto pts = shell_fixed_points(p, 0.60);
  REQUIRE(pts.size() == 4);
  for (const auto& q : pts) {
    CHECK(std::abs(q.position.x) == doctest::Approx(ref::kShell2_06X).epsilon(1e-14));
    CHECK(std::abs(q.position.z) == doctest::Approx(ref::kShell2_06Z).epsilon(1e-14));
    CHECK(q.position.y == doctest::Approx(ref::kShell2_06Y).epsilon(1e-14));
    CHECK(distance(apply_map(p, q.position), q.position) < 1e-9);
  }

  // Distinct bowl constants split the degenerate edge point into two.
  const auto edge = shell_fixed_points(p, w.r_lo);
  REQUIRE(edge.size() == 2);
  for (const auto& q : edge) {
    CHECK(q.stability == StabilityTag::Parabolic);
    CHECK(q.position.z == 0.0);  // the z-axis bowl is the deeper one here
    CHECK(std::abs(q.position.x) > 0.0);
  }
}

TEST_CASE("extremal rotation angles collapse or maximise the bowl") {
  const OptimalAngles oa = optimal_angles(0.15);
  CHECK(oa.theta_min == doctest::Approx(0.15 * kPi).epsilon(1e-15));
  CHECK(oa.c_min == doctest::Approx(0.15 * 0.15).epsilon(1e-12));
  CHECK(oa.theta_max == doctest::Approx(1.15 * kPi).epsilon(1e-15));
  CHECK(oa.c_max == doctest::Approx(1.0).epsilon(1e-12));
  // Nearby angles give strictly larger / smaller bowls.
  CHECK(bowl_constant(0.15, oa.theta_min + 0.05) > oa.c_min);
  CHECK(bowl_constant(0.15, oa.theta_min - 0.05 + 0.0) > oa.c_min);
  CHECK(bowl_constant(0.15, oa.theta_max - 0.05) < oa.c_max);
}

TEST_CASE("bowl-depth grid: parallel equals serial and loci are flagged") {
  const auto serial = bowl_depth_grid_serial(0.05, 0.45, 9, 0.1, 2.0 * kPi, 64);
  const auto par = bowl_depth_grid(0.05, 0.45, 9, 0.1, 2.0 * kPi, 64, 3);
  REQUIRE(serial.size() == par.size());
  REQUIRE(serial.size() == 9u * 64u);
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].eps == par[i].eps);
    CHECK(serial[i].theta == par[i].theta);
    CHECK(serial[i].c == par[i].c);
    CHECK(serial[i].depth_below_layer == par[i].depth_below_layer);
    CHECK(serial[i].locus == par[i].locus);
  }
  int locus1 = 0, locus2 = 0;
  for (const auto& cell : serial) {
    CHECK(cell.c == doctest::Approx(bowl_constant(cell.eps, cell.theta)).epsilon(1e-15));
    CHECK(cell.depth_below_layer ==
          doctest::Approx(std::sqrt(cell.c) - cell.eps).epsilon(1e-15));
    if (cell.locus == 1) {
      ++locus1;
      CHECK(std::abs(cell.theta - cell.eps * kPi) < (2.0 * kPi - 0.1) / 63.0);
    }
    if (cell.locus == 2) {
      ++locus2;
      CHECK(std::abs(cell.theta - (1.0 + cell.eps) * kPi) < (2.0 * kPi - 0.1) / 63.0);
    }
  }
  CHECK(locus1 >= 9);  // every eps row crosses theta = eps*pi in this range
  CHECK(locus2 >= 9);  // ... and theta = (1+eps)*pi
  CHECK_THROWS_AS(bowl_depth_grid(0.05, 0.45, 0, 0.3, kPi, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(bowl_depth_grid(0.05, 0.45, 4, -0.1, kPi, 8, 1), std::invalid_argument);
}
