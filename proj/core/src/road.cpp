#include "dopcbf/road.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dopcbf/plant.hpp"

namespace dopcbf {

namespace {

constexpr double kMaxGrade = 0.2;  // rad

}  // namespace

double RoadProfile::theta(double t) const {
  if (knots.empty()) throw ContractViolation("road: profile has no knots");
  if (t <= knots.front().first) return knots.front().second;
  if (t >= knots.back().first) return knots.back().second;
  for (size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].first) {
      const auto& [t0, th0] = knots[i - 1];
      const auto& [t1, th1] = knots[i];
      double w = (t - t0) / (t1 - t0);
      return th0 + w * (th1 - th0);
    }
  }
  return knots.back().second;
}

double RoadProfile::max_rate() const {
  double worst = 0.0;
  for (size_t i = 1; i < knots.size(); ++i) {
    double dt = knots[i].first - knots[i - 1].first;
    if (dt <= 0.0) continue;
    worst = std::max(worst, std::abs(knots[i].second - knots[i - 1].second) / dt);
  }
  return worst;
}

void RoadProfile::validate() const {
  if (knots.empty()) throw ContractViolation("road: profile has no knots");
  if (rate_bound <= 0.0) throw ContractViolation("road: rate_bound must be positive");
  for (size_t i = 0; i < knots.size(); ++i) {
    if (std::abs(knots[i].second) > kMaxGrade + 1e-12)
      throw ContractViolation("road: |theta| must not exceed 0.2 rad at knot " +
                              std::to_string(i));
    if (i > 0 && knots[i].first <= knots[i - 1].first)
      throw ContractViolation("road: knot times must be strictly increasing");
  }
  if (max_rate() > rate_bound + 1e-12)
    throw ContractViolation("road: grade slew exceeds rate_bound");
}

std::string RoadProfile::to_table() const {
  std::ostringstream out;
  out.precision(12);
  for (const auto& [t, th] : knots) out << t << " " << th << "\n";
  return out.str();
}

double three_section_road(double t) {
  if (t < 30.0) return 0.0;
  if (t < 40.0) return -0.15 * (t - 30.0) / 10.0;
  if (t < 65.0) return -0.15;
  if (t < 80.0) return -0.15 + 0.30 * (t - 65.0) / 15.0;
  return 0.15;
}

RoadProfile make_three_section_profile() {
  RoadProfile road;
  road.kind = RoadProfile::Kind::three_section;
  road.knots = {{0.0, 0.0},    {30.0, 0.0},  {40.0, -0.15},
                {65.0, -0.15}, {80.0, 0.15}, {100.0, 0.15}};
  road.rate_bound = 0.02;
  return road;
}

RoadProfile make_constant_profile(double theta) {
  RoadProfile road;
  road.kind = RoadProfile::Kind::constant;
  road.knots = {{0.0, theta}, {1.0, theta}};
  road.rate_bound = 0.02;
  return road;
}

RoadProfile random_road(std::uint64_t seed, double t_end, double rate_bound) {
  if (t_end <= 0.0) throw ContractViolation("road: t_end must be positive");
  if (rate_bound <= 0.0) throw ContractViolation("road: rate_bound must be positive");

  constexpr double kKnotSpacing = 10.0;
  std::mt19937_64 gen(seed);

  RoadProfile road;
  road.kind = RoadProfile::Kind::random;
  road.rate_bound = rate_bound;

  // Anchored flat at t = 0 (the ego starts on level road, like the
  // three-section profile; a steep grade at t = 0 could place the initial
  // state outside the safe set before any controller acts). Subsequent
  // knots every 10 s wander uniformly, rate-limited between knots.
  road.knots.emplace_back(0.0, 0.0);
  double prev_t = 0.0;
  double prev = 0.0;
  for (double t = kKnotSpacing; prev_t < t_end; t += kKnotSpacing) {
    double knot_t = std::min(t, t_end);
    double draw = -kMaxGrade + 2.0 * kMaxGrade * u64_to_unit(gen());
    double max_step = rate_bound * (knot_t - prev_t);
    double th = std::clamp(draw, prev - max_step, prev + max_step);
    road.knots.emplace_back(knot_t, th);
    prev_t = knot_t;
    prev = th;
  }
  return road;
}

std::uint64_t derive_run_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 on a golden-ratio stream offset by the run index.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double u64_to_unit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace dopcbf
