#include "hmhom/solid_harmonics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace hmhom {

namespace {

using Cplx = std::complex<double>;

// Complex solid harmonics gamma_l^m for 0 <= m <= l (no Condon-Shortley
// phase), from
//   gamma_m^m     = (2m-1)!! (x+iy)^m
//   gamma_{m+1}^m = (2m+1) z gamma_m^m
//   (l-m+1) gamma_{l+1}^m = (2l+1) z gamma_l^m - (l+m) r^2 gamma_{l-1}^m
// The gradient tables follow the differentiated recursion.
struct Table {
  int L;
  std::vector<Cplx> val;
  std::vector<Cplx> gx, gy, gz;
  bool with_grad;

  int at(int l, int m) const { return l * (L + 1) + m; }

  explicit Table(int L_, const Vec3& p, bool grad) : L(L_), with_grad(grad) {
    const int n = (L + 1) * (L + 1 + 1);
    val.assign(static_cast<std::size_t>(n), Cplx(0.0, 0.0));
    if (grad) {
      gx.assign(static_cast<std::size_t>(n), Cplx(0.0, 0.0));
      gy = gx;
      gz = gx;
    }
    const double x = p[0], y = p[1], z = p[2];
    const double r2 = p.squaredNorm();
    const Cplx w(x, y);

    Cplx wm(1.0, 0.0);        // w^m
    Cplx wm_prev(0.0, 0.0);   // w^{m-1}
    double dfact = 1.0;       // (2m-1)!!
    for (int m = 0; m <= L; ++m) {
      if (m > 0) dfact *= 2 * m - 1;
      const int d = at(m, m);
      val[static_cast<std::size_t>(d)] = dfact * wm;
      if (with_grad) {
        gx[static_cast<std::size_t>(d)] = dfact * double(m) * wm_prev;
        gy[static_cast<std::size_t>(d)] = dfact * double(m) * wm_prev * Cplx(0.0, 1.0);
        gz[static_cast<std::size_t>(d)] = 0.0;
      }
      if (m + 1 <= L) {
        const int u = at(m + 1, m);
        val[static_cast<std::size_t>(u)] = double(2 * m + 1) * z * val[static_cast<std::size_t>(d)];
        if (with_grad) {
          gx[static_cast<std::size_t>(u)] = double(2 * m + 1) * z * gx[static_cast<std::size_t>(d)];
          gy[static_cast<std::size_t>(u)] = double(2 * m + 1) * z * gy[static_cast<std::size_t>(d)];
          gz[static_cast<std::size_t>(u)] =
              double(2 * m + 1) * (val[static_cast<std::size_t>(d)] + z * gz[static_cast<std::size_t>(d)]);
        }
      }
      for (int l = m + 1; l < L; ++l) {
        const int t = at(l + 1, m), c = at(l, m), b = at(l - 1, m);
        const double a1 = double(2 * l + 1) / double(l - m + 1);
        const double a2 = double(l + m) / double(l - m + 1);
        val[static_cast<std::size_t>(t)] =
            a1 * z * val[static_cast<std::size_t>(c)] - a2 * r2 * val[static_cast<std::size_t>(b)];
        if (with_grad) {
          gx[static_cast<std::size_t>(t)] = a1 * z * gx[static_cast<std::size_t>(c)] -
                                            a2 * (r2 * gx[static_cast<std::size_t>(b)] +
                                                  2.0 * x * val[static_cast<std::size_t>(b)]);
          gy[static_cast<std::size_t>(t)] = a1 * z * gy[static_cast<std::size_t>(c)] -
                                            a2 * (r2 * gy[static_cast<std::size_t>(b)] +
                                                  2.0 * y * val[static_cast<std::size_t>(b)]);
          gz[static_cast<std::size_t>(t)] =
              a1 * (val[static_cast<std::size_t>(c)] + z * gz[static_cast<std::size_t>(c)]) -
              a2 * (r2 * gz[static_cast<std::size_t>(b)] + 2.0 * z * val[static_cast<std::size_t>(b)]);
        }
      }
      wm_prev = wm;
      wm *= w;
    }
  }
};

// Schmidt semi-normalization sqrt((2 - delta_m0) (l-m)!/(l+m)!).
double schmidt(int l, int m) {
  double ratio = 1.0;
  for (int k = l - m + 1; k <= l + m; ++k) ratio /= double(k);
  return std::sqrt((m == 0 ? 1.0 : 2.0) * ratio);
}

void check_range(int L) {
  if (L < 0) throw std::invalid_argument("degree must be >= 0");
}

}  // namespace

void eval_solid_harmonics(int L, const Vec3& x, std::span<double> values) {
  check_range(L);
  if (values.size() < static_cast<std::size_t>(sh_count(L)))
    throw std::invalid_argument("output span too small");
  const Table t(L, x, false);
  for (int l = 0; l <= L; ++l)
    for (int m = 0; m <= l; ++m) {
      const double nrm = schmidt(l, m);
      const Cplx v = t.val[static_cast<std::size_t>(t.at(l, m))];
      values[static_cast<std::size_t>(sh_index(l, m))] = nrm * v.real();
      if (m > 0) values[static_cast<std::size_t>(sh_index(l, -m))] = nrm * v.imag();
    }
}

void eval_solid_harmonics_grad(int L, const Vec3& x, std::span<double> values, std::span<Vec3> grads) {
  check_range(L);
  if (values.size() < static_cast<std::size_t>(sh_count(L)) ||
      grads.size() < static_cast<std::size_t>(sh_count(L)))
    throw std::invalid_argument("output span too small");
  const Table t(L, x, true);
  for (int l = 0; l <= L; ++l)
    for (int m = 0; m <= l; ++m) {
      const double nrm = schmidt(l, m);
      const std::size_t id = static_cast<std::size_t>(t.at(l, m));
      values[static_cast<std::size_t>(sh_index(l, m))] = nrm * t.val[id].real();
      grads[static_cast<std::size_t>(sh_index(l, m))] =
          nrm * Vec3{t.gx[id].real(), t.gy[id].real(), t.gz[id].real()};
      if (m > 0) {
        values[static_cast<std::size_t>(sh_index(l, -m))] = nrm * t.val[id].imag();
        grads[static_cast<std::size_t>(sh_index(l, -m))] =
            nrm * Vec3{t.gx[id].imag(), t.gy[id].imag(), t.gz[id].imag()};
      }
    }
}

double solid_harmonic(int l, int m, const Vec3& x) {
  check_range(l);
  if (std::abs(m) > l) throw std::invalid_argument("order out of range");
  std::vector<double> vals(static_cast<std::size_t>(sh_count(l)));
  eval_solid_harmonics(l, x, vals);
  return vals[static_cast<std::size_t>(sh_index(l, m))];
}

Vec3 solid_harmonic_grad(int l, int m, const Vec3& x) {
  check_range(l);
  if (std::abs(m) > l) throw std::invalid_argument("order out of range");
  std::vector<double> vals(static_cast<std::size_t>(sh_count(l)));
  std::vector<Vec3> grads(static_cast<std::size_t>(sh_count(l)));
  eval_solid_harmonics_grad(l, x, vals, grads);
  return grads[static_cast<std::size_t>(sh_index(l, m))];
}

}  // namespace hmhom
