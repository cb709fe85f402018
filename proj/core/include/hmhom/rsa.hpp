#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "hmhom/geometry.hpp"

namespace hmhom {

/// Deterministic random source used for all stochastic generation.
/// std::mt19937_64 produces an identical stream on every platform; uniform
/// doubles are derived from the top 53 bits, so fixtures are bit-reproducible
/// (std::uniform_real_distribution is implementation-defined and avoided).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform point in the ball of given radius centered at the origin.
  Vec3 in_ball(double radius);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Sequential rejection sampling of equal-radius spheres.
///
/// Candidate centers are drawn uniformly over the admissible region (the
/// shrunk ball, or the shrunk cube in the periodic case so inclusions stay
/// wholly inside one period copy) and rejected on any overlap; the periodic
/// case checks all 26 neighbor images. `max_attempts` counts consecutive
/// rejections per sphere; exceeding it throws PlacementFailure.
Microstructure generate_rsa(const Domain& domain, int count, double radius, std::uint64_t seed,
                            int max_attempts = 20000, double kappa_matrix = 1.0,
                            double kappa_inclusion = 100.0);

/// Variant with one radius per sphere, placed in the given order.
Microstructure generate_rsa(const Domain& domain, std::span<const double> radii, std::uint64_t seed,
                            int max_attempts = 20000, double kappa_matrix = 1.0,
                            double kappa_inclusion = 100.0);

/// Radius giving the target volume fraction for `count` equal spheres.
double radius_for_volume_fraction(const Domain& domain, int count, double fraction);

}  // namespace hmhom
