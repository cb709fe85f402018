#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hmhom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Spherical inclusion carrying its diffusion coefficient.
struct Sphere {
  Vec3 center{Vec3::Zero()};
  double radius{1.0};
  double kappa{1.0};

  double volume() const;
};

/// Computational domain: a ball of given radius centered at the origin, or
/// the open unit periodic cube (-1/2, 1/2)^3.
struct Domain {
  enum class Kind { Ball, PeriodicCube };

  Kind kind{Kind::Ball};
  double ball_radius{1.0};

  static Domain ball(double radius);
  static Domain periodic_cube();

  double volume() const;
};

/// A particulate geometry: non-overlapping spheres embedded in a homogeneous
/// matrix that fills the rest of the domain.
struct Microstructure {
  Domain domain;
  double kappa_matrix{1.0};
  std::vector<Sphere> spheres;

  /// Checks radii/coefficients, strict pairwise disjointness (including the
  /// 26 neighbor images in the periodic case) and containment in the domain.
  /// Throws std::invalid_argument on the first violation.
  void validate() const;
};

/// Sum of inclusion volumes divided by the domain volume.
double volume_fraction(const Microstructure& ms);

/// Wraps every component of x to the nearest-image representative in
/// [-1/2, 1/2).
Vec3 fold_to_unit_cell(const Vec3& x);

/// The 27 lattice offsets {-1,0,1}^3, the zero offset first.
const std::vector<Vec3>& neighbor_offsets();

}  // namespace hmhom
