#include "hmhom/rsa.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmhom/errors.hpp"

namespace hmhom {

Vec3 Rng::in_ball(double radius) {
  while (true) {
    Vec3 p{uniform(-radius, radius), uniform(-radius, radius), uniform(-radius, radius)};
    if (p.squaredNorm() < radius * radius) return p;
  }
}

namespace {

bool overlaps_any(const std::vector<Sphere>& placed, const Vec3& c, double r, bool periodic) {
  for (const Sphere& s : placed) {
    const double rsum = r + s.radius;
    if (periodic) {
      for (const Vec3& off : neighbor_offsets())
        if ((c - s.center - off).squaredNorm() <= rsum * rsum) return true;
    } else {
      if ((c - s.center).squaredNorm() <= rsum * rsum) return true;
    }
  }
  return false;
}

}  // namespace

Microstructure generate_rsa(const Domain& domain, std::span<const double> radii, std::uint64_t seed,
                            int max_attempts, double kappa_matrix, double kappa_inclusion) {
  const bool periodic = domain.kind == Domain::Kind::PeriodicCube;
  Microstructure ms;
  ms.domain = domain;
  ms.kappa_matrix = kappa_matrix;
  ms.spheres.reserve(radii.size());

  Rng rng(seed);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (!(r > 0.0)) throw std::invalid_argument("sphere radius must be positive");
    if (periodic) {
      if (!(r < 0.5)) throw PlacementFailure("radius too large for the unit cell");
    } else {
      if (!(r < domain.ball_radius)) throw PlacementFailure("radius too large for the ball domain");
    }
    int attempts = 0;
    while (true) {
      Vec3 c;
      if (periodic) {
        const double h = 0.5 - r;
        c = Vec3{rng.uniform(-h, h), rng.uniform(-h, h), rng.uniform(-h, h)};
      } else {
        c = rng.in_ball(domain.ball_radius - r);
      }
      if (!overlaps_any(ms.spheres, c, r, periodic)) {
        ms.spheres.push_back(Sphere{c, r, kappa_inclusion});
        break;
      }
      if (++attempts >= max_attempts)
        throw PlacementFailure("could not place sphere " + std::to_string(i) + " after " +
                               std::to_string(max_attempts) + " rejections");
    }
  }
  return ms;
}

Microstructure generate_rsa(const Domain& domain, int count, double radius, std::uint64_t seed,
                            int max_attempts, double kappa_matrix, double kappa_inclusion) {
  if (count < 0) throw std::invalid_argument("sphere count must be non-negative");
  std::vector<double> radii(static_cast<std::size_t>(count), radius);
  return generate_rsa(domain, radii, seed, max_attempts, kappa_matrix, kappa_inclusion);
}

double radius_for_volume_fraction(const Domain& domain, int count, double fraction) {
  if (count <= 0 || !(fraction > 0.0)) throw std::invalid_argument("need count > 0 and fraction > 0");
  const double per_sphere = fraction * domain.volume() / count;
  return std::cbrt(per_sphere * 3.0 / (4.0 * std::numbers::pi));
}

}  // namespace hmhom
