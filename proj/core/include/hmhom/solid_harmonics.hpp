#pragma once

#include <span>

#include "hmhom/geometry.hpp"

namespace hmhom {

/// Linear index of degree l, order m (|m| <= l): l^2 + l + m.
inline int sh_index(int l, int m) { return l * l + l + m; }
/// Number of basis functions through degree L.
inline int sh_count(int L) { return (L + 1) * (L + 1); }

/// Real regular solid harmonics: homogeneous harmonic polynomials of degree
/// l, Schmidt semi-normalized so values stay O(r^l). Order m >= 0 selects the
/// cosine-type function, m < 0 the sine-type of order |m|. Computed for all
/// degrees 0..L by the associated Legendre recursion homogenized in Cartesian
/// form; gradients follow by differentiating the same recursion.
void eval_solid_harmonics(int L, const Vec3& x, std::span<double> values);
void eval_solid_harmonics_grad(int L, const Vec3& x, std::span<double> values, std::span<Vec3> grads);

double solid_harmonic(int l, int m, const Vec3& x);
Vec3 solid_harmonic_grad(int l, int m, const Vec3& x);

}  // namespace hmhom
