#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hmhom/geometry.hpp"

namespace hmhom {

/// Representation of the periodic Laplace Green's function on the unit cell:
/// free-space singular part(s) + |x|^2/6 + a harmonic remainder expanded in
/// real solid harmonics. The plain variant keeps only the central free-space
/// copy; the image-corrected variant also subtracts the 26 neighbor copies
/// from the remainder, which it therefore must not represent.
struct PeriodicGreenExpansion {
  enum class Variant { Plain, ImageCorrected };

  Variant variant{Variant::ImageCorrected};
  int degree{9};                 // truncation degree L
  Eigen::VectorXd coeffs;        // (L+1)^2 entries indexed by sh_index; coeffs[0] stays 0
  double gauge_constant{0.0};    // fixes the additive gauge against the spectral reference
  double fit_defect{0.0};        // RMS periodicity residual of the fit
};

/// Spectral evaluation of the periodic Green's function (zero-mean gauge),
/// used only as a test oracle. The lattice sum is split into an erfc-screened
/// real-space part and a Gaussian-damped reciprocal part so the result is
/// converged to near machine precision for any k_max >= 8; inputs are folded
/// to the unit cell, making periodicity and evenness exact.
double fourier_reference(const Vec3& x, int k_max);

/// Least-squares fit of the expansion coefficients: periodicity of the value
/// and the normal derivative is enforced on all three face pairs at Gauss
/// quadrature points and solved by column-pivoted QR (never normal
/// equations). quadrature_order 0 picks the smallest order with at least 4x
/// overdetermination. The constant (0,0) column is pure gauge and excluded;
/// the gauge is fixed afterwards by matching fourier_reference at one probe
/// point. Throws if the sampled system is rank-deficient beyond the gauge.
PeriodicGreenExpansion fit_expansion(int degree, PeriodicGreenExpansion::Variant variant,
                                     int quadrature_order = 0);

/// Representation value/gradient without folding or gauge; exactly what the
/// fit optimizes. Evaluating at a lattice point of the represented copies is
/// singular.
double eval_raw(const PeriodicGreenExpansion& exp, const Vec3& x);
Vec3 grad_raw(const PeriodicGreenExpansion& exp, const Vec3& x);

/// Periodic evaluation: folds x into the unit cell, adds the gauge constant.
double eval_gper(const PeriodicGreenExpansion& exp, const Vec3& x);
Vec3 grad_gper(const PeriodicGreenExpansion& exp, const Vec3& x);

/// Value/gradient of the representation minus the central free-space copy;
/// smooth at x = 0 (used for boundary-operator diagonal terms).
double eval_gper_regular(const PeriodicGreenExpansion& exp, const Vec3& x);
Vec3 grad_gper_regular(const PeriodicGreenExpansion& exp, const Vec3& x);

/// Max periodicity mismatch of value and normal derivative over a uniform
/// grid on the three face pairs (independent of the fit's sample points).
double periodicity_defect(const PeriodicGreenExpansion& exp, int samples_per_side = 12);

/// Gauss-Legendre nodes and weights on [-1/2, 1/2].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace hmhom
