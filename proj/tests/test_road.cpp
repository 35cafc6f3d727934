#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "dopcbf/plant.hpp"
#include "dopcbf/road.hpp"

using namespace dopcbf;

TEST_SUITE("road") {

TEST_CASE("three-section grade values") {
  CHECK(three_section_road(0.0) == 0.0);
  CHECK(three_section_road(29.999) == 0.0);
  CHECK(three_section_road(35.0) == doctest::Approx(-0.075).epsilon(1e-12));
  CHECK(three_section_road(50.0) == doctest::Approx(-0.15).epsilon(1e-15));
  CHECK(three_section_road(72.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(three_section_road(90.0) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(three_section_road(1000.0) == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("knot profile reproduces the closed-form three-section road") {
  RoadProfile road = make_three_section_profile();
  CHECK_NOTHROW(road.validate());
  for (double t = 0.0; t <= 100.0; t += 0.37)
    CHECK(road.theta(t) == doctest::Approx(three_section_road(t)).epsilon(1e-12));
}

TEST_CASE("three-section slew tops out at the incline ramp") {
  // Steepest segment: -0.15 -> +0.15 over 15 s = 0.02 rad/s, exactly at the
  // default rate bound.
  RoadProfile road = make_three_section_profile();
  CHECK(road.max_rate() == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(road.max_rate() <= road.rate_bound + 1e-12);
}

TEST_CASE("interpolation is continuous at knots and clamped outside") {
  RoadProfile road = make_three_section_profile();
  for (const auto& [t, th] : road.knots) {
    CHECK(road.theta(t) == doctest::Approx(th).epsilon(1e-15));
    CHECK(road.theta(t - 1e-9) == doctest::Approx(th).epsilon(1e-6));
    CHECK(road.theta(t + 1e-9) == doctest::Approx(th).epsilon(1e-6));
  }
  CHECK(road.theta(-5.0) == road.knots.front().second);
  CHECK(road.theta(500.0) == road.knots.back().second);
}

TEST_CASE("constant profile holds its grade everywhere") {
  RoadProfile road = make_constant_profile(-0.12);
  for (double t : {0.0, 0.5, 3.0, 100.0}) CHECK(road.theta(t) == -0.12);
  CHECK_NOTHROW(road.validate());
}

TEST_CASE("random roads are deterministic in the seed") {
  RoadProfile a = random_road(987654321, 100.0, 0.02);
  RoadProfile b = random_road(987654321, 100.0, 0.02);
  RoadProfile c = random_road(987654322, 100.0, 0.02);
  REQUIRE(a.knots.size() == b.knots.size());
  for (std::size_t i = 0; i < a.knots.size(); ++i) {
    CHECK(a.knots[i].first == b.knots[i].first);
    CHECK(a.knots[i].second == b.knots[i].second);
  }
  bool identical = a.knots.size() == c.knots.size();
  if (identical)
    for (std::size_t i = 0; i < a.knots.size(); ++i)
      identical = identical && a.knots[i].second == c.knots[i].second;
  CHECK_FALSE(identical);
}

TEST_CASE("random roads start flat, stay in grade bounds, respect the rate bound") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RoadProfile road = random_road(derive_run_seed(42, seed), 100.0, 0.02);
    REQUIRE(!road.knots.empty());
    CHECK(road.knots.front().first == 0.0);
    CHECK(road.knots.front().second == 0.0);
    CHECK(road.knots.back().first == doctest::Approx(100.0).epsilon(1e-12));
    for (const auto& [t, th] : road.knots) CHECK(std::abs(th) <= 0.2);
    CHECK(road.max_rate() <= 0.02 + 1e-12);
    CHECK_NOTHROW(road.validate());
  }
}

TEST_CASE("random knots fill the horizon every 10 s") {
  RoadProfile road = random_road(7, 95.0, 0.02);
  REQUIRE(road.knots.size() >= 2);
  for (std::size_t i = 1; i + 1 < road.knots.size(); ++i)
    CHECK(road.knots[i].first == doctest::Approx(10.0 * i).epsilon(1e-12));
  CHECK(road.knots.back().first == doctest::Approx(95.0).epsilon(1e-12));
}

TEST_CASE("derived run seeds neither collide nor depend on call order") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_run_seed(42, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_run_seed(42, 17) == derive_run_seed(42, 17));
  CHECK(derive_run_seed(42, 17) != derive_run_seed(43, 17));
}

TEST_CASE("unit-interval draws are deterministic and in [0, 1)") {
  CHECK(u64_to_unit(0) == 0.0);
  CHECK(u64_to_unit(~0ULL) < 1.0);
  CHECK(u64_to_unit(~0ULL) >= 0.999999999);
  CHECK(u64_to_unit(0x123456789abcdef0ULL) == u64_to_unit(0x123456789abcdef0ULL));
}

TEST_CASE("validation rejects bad profiles") {
  RoadProfile steep;
  steep.knots = {{0.0, 0.0}, {10.0, 0.25}};  // grade over 0.2 rad
  steep.rate_bound = 0.05;
  CHECK_THROWS_AS(steep.validate(), ContractViolation);

  RoadProfile fast;
  fast.knots = {{0.0, -0.1}, {5.0, 0.1}};  // slew 0.04 rad/s
  fast.rate_bound = 0.02;
  CHECK_THROWS_AS(fast.validate(), ContractViolation);

  RoadProfile unsorted;
  unsorted.knots = {{0.0, 0.0}, {10.0, 0.1}, {10.0, 0.15}};
  unsorted.rate_bound = 1.0;
  CHECK_THROWS_AS(unsorted.validate(), ContractViolation);

  RoadProfile empty;
  CHECK_THROWS_AS(empty.validate(), ContractViolation);
}

TEST_CASE("profiles serialize to a parseable two-column table") {
  RoadProfile road = make_three_section_profile();
  std::istringstream in(road.to_table());
  std::size_t rows = 0;
  double t = 0.0, th = 0.0;
  while (in >> t >> th) {
    REQUIRE(rows < road.knots.size());
    CHECK(t == doctest::Approx(road.knots[rows].first).epsilon(1e-12));
    CHECK(th == doctest::Approx(road.knots[rows].second).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == road.knots.size());
}

}  // TEST_SUITE
