#pragma once
// Independent reference computations for the tests. Nothing here calls the
// library numerics; only plain data types are shared.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Blasius shooting with a classic RK4 and plain bisection.
inline double fp_end(double s, double z_max, double h) {
  const int n = static_cast<int>(std::lround(z_max / h));
  double f = 0, fp = 0, fpp = s;
  auto rhs = [](double a, double b, double c, double* k) { k[0] = b; k[1] = c; k[2] = -a * c; };
  for (int i = 0; i < n; ++i) {
    double k1[3], k2[3], k3[3], k4[3];
    rhs(f, fp, fpp, k1);
    rhs(f + h / 2 * k1[0], fp + h / 2 * k1[1], fpp + h / 2 * k1[2], k2);
    rhs(f + h / 2 * k2[0], fp + h / 2 * k2[1], fpp + h / 2 * k2[2], k3);
    rhs(f + h * k3[0], fp + h * k3[1], fpp + h * k3[2], k4);
    f += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    fp += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    fpp += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
  }
  return fp;
}

inline double shoot_b0(double z_max, double h) {
  double lo = 0.2, hi = 0.8;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fp_end(mid, z_max, h) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Richardson extrapolation of the fourth-order shooting value.
inline double richardson_b0(double z_max, double h) {
  const double coarse = shoot_b0(z_max, h), fine = shoot_b0(z_max, h / 2);
  return fine + (fine - coarse) / 15.0;
}

// Dense generalized symmetric eigenproblem for -(p v')' + q v = lambda m v on
// the given nodes, v = 0 at both ends, flux at cell midpoints and lumped nodal
// mass. p is evaluated at midpoints, q and m at nodes (m is a density).
inline Eigen::VectorXd dense_sturm_liouville(const std::vector<double>& x, const std::function<double(double)>& p,
                                             const std::function<double(double)>& q,
                                             const std::function<double(double)>& m, int count) {
  const int n = static_cast<int>(x.size()) - 2;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) {
    const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    const double pl = p(0.5 * (x[i] + x[i - 1])) / hl, pr = p(0.5 * (x[i] + x[i + 1])) / hr;
    const double w = 0.5 * (hl + hr);
    K(i - 1, i - 1) = pl + pr + q(x[i]) * m(x[i]) * w;
    if (i > 1) K(i - 1, i - 2) = -pl;
    if (i < n) K(i - 1, i) = -pr;
    M(i - 1, i - 1) = m(x[i]) * w;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  return es.eigenvalues().head(count);
}

// Exact omega for u = f'(y / sqrt(2 (x + s))) in the coordinates xi = ln(x + d),
// from the stream function sqrt(2 (x + s)) f(z) = sqrt(x + d) psi.
// `f_and_fp(z)` returns {f, f'} from an independent Blasius table.
template <typename F>
double shifted_omega(const F& f_and_fp, double psi, double s, double d, double xi) {
  const double x = std::exp(xi) - d;
  const double target = psi * std::sqrt(x + d) / std::sqrt(2.0 * (x + s));
  double lo = 0.0, hi = 1.0;
  while (f_and_fp(hi).first < target) hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f_and_fp(mid).first < target ? lo : hi) = mid;
  }
  const double fp = f_and_fp(0.5 * (lo + hi)).second;
  return fp * fp;
}

// Independent dense Blasius table with f, f' by RK4 at step h and linear
// interpolation in between (h small enough that this is not the bottleneck).
struct Table {
  double h;
  std::vector<double> f, fp;
  Table(double z_max, double h_) : h(h_) {
    const double b0 = shoot_b0(z_max, h);
    const int n = static_cast<int>(std::lround(z_max / h));
    double a = 0, b = 0, c = b0;
    f.push_back(a);
    fp.push_back(b);
    auto rhs = [](double x, double y, double z, double* k) { k[0] = y; k[1] = z; k[2] = -x * z; };
    for (int i = 0; i < n; ++i) {
      double k1[3], k2[3], k3[3], k4[3];
      rhs(a, b, c, k1);
      rhs(a + h / 2 * k1[0], b + h / 2 * k1[1], c + h / 2 * k1[2], k2);
      rhs(a + h / 2 * k2[0], b + h / 2 * k2[1], c + h / 2 * k2[2], k3);
      rhs(a + h * k3[0], b + h * k3[1], c + h * k3[2], k4);
      a += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      b += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      c += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
      f.push_back(a);
      fp.push_back(b);
    }
  }
  std::pair<double, double> operator()(double z) const {
    const int n = static_cast<int>(f.size()) - 1;
    if (z >= n * h) return {f[n] + (z - n * h), 1.0};
    const int k = std::min(static_cast<int>(z / h), n - 1);
    const double t = z / h - k;
    // cubic Hermite for f using f', linear for f'
    const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
    const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
    return {h00 * f[k] + h10 * h * fp[k] + h01 * f[k + 1] + h11 * h * fp[k + 1], (1 - t) * fp[k] + t * fp[k + 1]};
  }
};

}  // namespace oracle
