#include "hmhom/periodic_green.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hmhom/solid_harmonics.hpp"

namespace hmhom {

namespace {

constexpr double kPi = std::numbers::pi;

double g_free(const Vec3& r) { return 1.0 / (4.0 * kPi * r.norm()); }
Vec3 g_free_grad(const Vec3& r) {
  const double d2 = r.squaredNorm();
  return -r / (4.0 * kPi * d2 * std::sqrt(d2));
}

// Explicit (non-harmonic-remainder) part of the representation and its
// gradient: the free-space copies plus |x|^2/6.
double explicit_part(PeriodicGreenExpansion::Variant variant, const Vec3& x) {
  double g = x.squaredNorm() / 6.0;
  if (variant == PeriodicGreenExpansion::Variant::Plain) {
    g += g_free(x);
  } else {
    for (const Vec3& off : neighbor_offsets()) g += g_free(x + off);
  }
  return g;
}

Vec3 explicit_grad(PeriodicGreenExpansion::Variant variant, const Vec3& x) {
  Vec3 g = x / 3.0;
  if (variant == PeriodicGreenExpansion::Variant::Plain) {
    g += g_free_grad(x);
  } else {
    for (const Vec3& off : neighbor_offsets()) g += g_free_grad(x + off);
  }
  return g;
}

void check_not_singular(const Vec3& x) {
  if (!(x.norm() > 1e-12)) throw std::invalid_argument("evaluation at a singularity of the Green function");
}

}  // namespace

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on Legendre polynomials over [-1, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(i)] = 0.5 * x;                        // map to [-1/2, 1/2]
    weights[static_cast<std::size_t>(i)] = 0.5 * 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double fourier_reference(const Vec3& x, int k_max) {
  if (k_max < 8) throw std::invalid_argument("k_max must be >= 8");
  const Vec3 xf = fold_to_unit_cell(x);
  check_not_singular(xf);

  // Splitting parameter: reciprocal terms at |k| = k_max are damped below
  // ~1e-14, and the real-space sum over {-2..2}^3 screens to the same level.
  const double alpha = kPi * k_max / std::sqrt(std::log(1e14));

  double real_part = 0.0;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int k = -2; k <= 2; ++k) {
        const Vec3 r = xf + Vec3{double(i), double(j), double(k)};
        const double d = r.norm();
        real_part += std::erfc(alpha * d) / (4.0 * kPi * d);
      }

  double recip = 0.0;
  const double damp = kPi * kPi / (alpha * alpha);
  for (int i = -k_max; i <= k_max; ++i)
    for (int j = -k_max; j <= k_max; ++j)
      for (int k = -k_max; k <= k_max; ++k) {
        const double k2 = double(i) * i + double(j) * j + double(k) * k;
        if (k2 == 0.0) continue;
        recip += std::exp(-damp * k2) / k2 *
                 std::cos(2.0 * kPi * (i * xf[0] + j * xf[1] + k * xf[2]));
      }
  recip /= 4.0 * kPi * kPi;

  // Subtracting the cell mean of the screened real-space sum keeps the
  // zero-mean gauge of the plain spectral sum.
  return real_part + recip - 1.0 / (4.0 * alpha * alpha);
}

PeriodicGreenExpansion fit_expansion(int degree, PeriodicGreenExpansion::Variant variant,
                                     int quadrature_order) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  const int ncoef = sh_count(degree);

  int q = quadrature_order;
  if (q <= 0) {
    q = 2;
    while (6 * q * q < 4 * ncoef) ++q;
  }
  const int rows = 6 * q * q;
  if (rows < 2 * ncoef) throw std::invalid_argument("quadrature order too small for the fit");

  std::vector<double> nodes, weights;
  gauss_legendre_unit(q, nodes, weights);

  // Unknowns: coefficients for l >= 1; the constant only shifts the gauge
  // and drops out of every periodic-difference row.
  const int ncols = ncoef - 1;
  Eigen::MatrixXd a(rows, ncols);
  Eigen::VectorXd b(rows);

  std::vector<double> vp(static_cast<std::size_t>(ncoef)), vm(static_cast<std::size_t>(ncoef));
  std::vector<Vec3> gp(static_cast<std::size_t>(ncoef)), gm(static_cast<std::size_t>(ncoef));

  int r = 0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int iu = 0; iu < q; ++iu)
      for (int iv = 0; iv < q; ++iv) {
        Vec3 xp = Vec3::Zero(), xm = Vec3::Zero();
        xp[axis] = 0.5;
        xm[axis] = -0.5;
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        xp[u] = xm[u] = nodes[static_cast<std::size_t>(iu)];
        xp[v] = xm[v] = nodes[static_cast<std::size_t>(iv)];

        eval_solid_harmonics_grad(degree, xp, vp, gp);
        eval_solid_harmonics_grad(degree, xm, vm, gm);

        for (int c = 1; c < ncoef; ++c) {
          a(r, c - 1) = vp[static_cast<std::size_t>(c)] - vm[static_cast<std::size_t>(c)];
          a(r + 1, c - 1) =
              gp[static_cast<std::size_t>(c)][axis] - gm[static_cast<std::size_t>(c)][axis];
        }
        b[r] = -(explicit_part(variant, xp) - explicit_part(variant, xm));
        b[r + 1] = -(explicit_grad(variant, xp)[axis] - explicit_grad(variant, xm)[axis]);
        r += 2;
      }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < ncols)
    throw std::invalid_argument("rank-deficient periodicity fit: increase the quadrature order");
  const Eigen::VectorXd beta = qr.solve(b);

  PeriodicGreenExpansion exp;
  exp.variant = variant;
  exp.degree = degree;
  exp.coeffs = Eigen::VectorXd::Zero(ncoef);
  exp.coeffs.tail(ncols) = beta;
  exp.fit_defect = std::sqrt((a * beta - b).squaredNorm() / rows);

  const Vec3 probe{0.25, 0.25, 0.25};
  exp.gauge_constant = fourier_reference(probe, 8) - eval_raw(exp, probe);
  return exp;
}

double eval_raw(const PeriodicGreenExpansion& exp, const Vec3& x) {
  std::vector<double> vals(static_cast<std::size_t>(sh_count(exp.degree)));
  eval_solid_harmonics(exp.degree, x, vals);
  double g = explicit_part(exp.variant, x);
  for (int c = 0; c < exp.coeffs.size(); ++c) g += exp.coeffs[c] * vals[static_cast<std::size_t>(c)];
  return g;
}

Vec3 grad_raw(const PeriodicGreenExpansion& exp, const Vec3& x) {
  std::vector<double> vals(static_cast<std::size_t>(sh_count(exp.degree)));
  std::vector<Vec3> grads(static_cast<std::size_t>(sh_count(exp.degree)));
  eval_solid_harmonics_grad(exp.degree, x, vals, grads);
  Vec3 g = explicit_grad(exp.variant, x);
  for (int c = 0; c < exp.coeffs.size(); ++c) g += exp.coeffs[c] * grads[static_cast<std::size_t>(c)];
  return g;
}

double eval_gper(const PeriodicGreenExpansion& exp, const Vec3& x) {
  const Vec3 xf = fold_to_unit_cell(x);
  check_not_singular(xf);
  return eval_raw(exp, xf) + exp.gauge_constant;
}

Vec3 grad_gper(const PeriodicGreenExpansion& exp, const Vec3& x) {
  const Vec3 xf = fold_to_unit_cell(x);
  check_not_singular(xf);
  return grad_raw(exp, xf);
}

double eval_gper_regular(const PeriodicGreenExpansion& exp, const Vec3& x) {
  const Vec3 xf = fold_to_unit_cell(x);
  std::vector<double> vals(static_cast<std::size_t>(sh_count(exp.degree)));
  eval_solid_harmonics(exp.degree, xf, vals);
  double g = xf.squaredNorm() / 6.0 + exp.gauge_constant;
  if (exp.variant == PeriodicGreenExpansion::Variant::ImageCorrected) {
    const auto& offsets = neighbor_offsets();
    for (std::size_t i = 1; i < offsets.size(); ++i) g += g_free(xf + offsets[i]);
  }
  for (int c = 0; c < exp.coeffs.size(); ++c) g += exp.coeffs[c] * vals[static_cast<std::size_t>(c)];
  return g;
}

Vec3 grad_gper_regular(const PeriodicGreenExpansion& exp, const Vec3& x) {
  const Vec3 xf = fold_to_unit_cell(x);
  std::vector<double> vals(static_cast<std::size_t>(sh_count(exp.degree)));
  std::vector<Vec3> grads(static_cast<std::size_t>(sh_count(exp.degree)));
  eval_solid_harmonics_grad(exp.degree, xf, vals, grads);
  Vec3 g = xf / 3.0;
  if (exp.variant == PeriodicGreenExpansion::Variant::ImageCorrected) {
    const auto& offsets = neighbor_offsets();
    for (std::size_t i = 1; i < offsets.size(); ++i) g += g_free_grad(xf + offsets[i]);
  }
  for (int c = 0; c < exp.coeffs.size(); ++c) g += exp.coeffs[c] * grads[static_cast<std::size_t>(c)];
  return g;
}

double periodicity_defect(const PeriodicGreenExpansion& exp, int samples_per_side) {
  double worst = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    for (int iu = 0; iu < samples_per_side; ++iu)
      for (int iv = 0; iv < samples_per_side; ++iv) {
        Vec3 xp = Vec3::Zero();
        xp[axis] = 0.5;
        xp[u] = -0.5 + (iu + 0.5) / samples_per_side;
        xp[v] = -0.5 + (iv + 0.5) / samples_per_side;
        Vec3 xm = xp;
        xm[axis] = -0.5;
        worst = std::max(worst, std::abs(eval_raw(exp, xp) - eval_raw(exp, xm)));
        worst = std::max(worst, std::abs(grad_raw(exp, xp)[axis] - grad_raw(exp, xm)[axis]));
      }
  }
  return worst;
}

}  // namespace hmhom
