#include "hmhom/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hmhom {

double Sphere::volume() const {
  return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

Domain Domain::ball(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  return Domain{Kind::Ball, radius};
}

Domain Domain::periodic_cube() { return Domain{Kind::PeriodicCube, 0.0}; }

double Domain::volume() const {
  if (kind == Kind::Ball)
    return 4.0 / 3.0 * std::numbers::pi * ball_radius * ball_radius * ball_radius;
  return 1.0;
}

Vec3 fold_to_unit_cell(const Vec3& x) {
  Vec3 y;
  for (int i = 0; i < 3; ++i) y[i] = x[i] - std::round(x[i]);
  return y;
}

const std::vector<Vec3>& neighbor_offsets() {
  static const std::vector<Vec3> offsets = [] {
    std::vector<Vec3> v;
    v.emplace_back(0.0, 0.0, 0.0);
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k)
          if (i != 0 || j != 0 || k != 0) v.emplace_back(double(i), double(j), double(k));
    return v;
  }();
  return offsets;
}

void Microstructure::validate() const {
  if (!(kappa_matrix > 0.0)) throw std::invalid_argument("matrix coefficient must be positive");
  for (std::size_t a = 0; a < spheres.size(); ++a) {
    const Sphere& s = spheres[a];
    if (!(s.radius > 0.0))
      throw std::invalid_argument("sphere " + std::to_string(a) + " has non-positive radius");
    if (!(s.kappa > 0.0))
      throw std::invalid_argument("sphere " + std::to_string(a) + " has non-positive coefficient");
    if (domain.kind == Domain::Kind::Ball) {
      if (!(s.center.norm() + s.radius < domain.ball_radius))
        throw std::invalid_argument("sphere " + std::to_string(a) + " is not strictly inside the ball");
    } else {
      for (int i = 0; i < 3; ++i)
        if (!(std::abs(s.center[i]) + s.radius < 0.5))
          throw std::invalid_argument("sphere " + std::to_string(a) + " is not strictly inside the unit cell");
    }
  }
  const bool periodic = domain.kind == Domain::Kind::PeriodicCube;
  for (std::size_t a = 0; a < spheres.size(); ++a) {
    for (std::size_t b = a + 1; b < spheres.size(); ++b) {
      const double rsum = spheres[a].radius + spheres[b].radius;
      if (periodic) {
        for (const Vec3& off : neighbor_offsets()) {
          if ((spheres[a].center - spheres[b].center - off).norm() <= rsum)
            throw std::invalid_argument("spheres " + std::to_string(a) + " and " + std::to_string(b) +
                                        " overlap (periodic images included)");
        }
      } else {
        if ((spheres[a].center - spheres[b].center).norm() <= rsum)
          throw std::invalid_argument("spheres " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
      }
    }
  }
}

double volume_fraction(const Microstructure& ms) {
  double v = 0.0;
  for (const Sphere& s : ms.spheres) v += s.volume();
  return v / ms.domain.volume();
}

}  // namespace hmhom
