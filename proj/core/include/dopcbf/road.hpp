#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dopcbf {

/// Piecewise-linear road grade profile theta(t) in radians, theta > 0 uphill.
struct RoadProfile {
  enum class Kind { three_section, random, constant, custom };

  Kind kind = Kind::three_section;
  std::vector<std::pair<double, double>> knots;  ///< (t, theta), t ascending
  double rate_bound = 0.02;                      ///< max |theta_dot| (rad/s)

  /// Linear interpolation between knots; clamped to the end values outside.
  double theta(double t) const;

  /// Largest |d theta / dt| over the profile's linear segments.
  double max_rate() const;

  /// Throws ContractViolation if knots are unsorted, a grade magnitude
  /// exceeds 0.2 rad, or a segment exceeds rate_bound.
  void validate() const;

  /// Two-column text table "t theta" with one knot per line.
  std::string to_table() const;
};

/// Grade at time t of the standard three-section road: flat for 30 s, a ramp
/// to a -0.15 rad decline over 10 s, a hold, a ramp to a +0.15 rad incline
/// over 15 s, and a final hold to 100 s.
double three_section_road(double t);

/// The three-section road as a knot-based profile (equals three_section_road
/// pointwise).
RoadProfile make_three_section_profile();

/// Constant-grade profile (useful for observer convergence studies).
RoadProfile make_constant_profile(double theta);

/// Random road: knots every 10 s with theta ~ U[-0.2, 0.2], successive knot
/// differences clipped to rate_bound * 10 s. Deterministic in the seed.
RoadProfile random_road(std::uint64_t seed, double t_end, double rate_bound);

/// Derives the per-run seed for run `index` from a master seed (splitmix64
/// over master + golden-ratio stride), so batch runs are independent yet
/// reproducible.
std::uint64_t derive_run_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic, platform-independent uniform draw in [0, 1) from a 64-bit
/// generator word.
double u64_to_unit(std::uint64_t word);

}  // namespace dopcbf
