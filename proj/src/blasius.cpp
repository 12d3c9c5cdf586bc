#include "prandtl/blasius.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "prandtl/errors.hpp"

namespace prandtl {
namespace {

// (f, f', f'', int f)
using State = std::array<double, 4>;

State rhs(const State& y) { return {y[1], y[2], -y[0] * y[2], y[0]}; }

State rk4(const State& y, double h) {
  auto axpy = [](const State& a, double s, const State& b) {
    return State{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]};
  };
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, 0.5 * h, k1));
  const State k3 = rhs(axpy(y, 0.5 * h, k2));
  const State k4 = rhs(axpy(y, h, k3));
  State out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Index step_count(double z_max, double step) {
  return static_cast<Index>(std::llround(z_max / step));
}

double integrate_fp_end(double s, double z_max, Index n) {
  const double h = z_max / static_cast<double>(n);
  State y{0.0, 0.0, s, 0.0};
  for (Index i = 0; i < n; ++i) y = rk4(y, h);
  return y[1];
}

// Integral of f'' over [z, inf) when f' has already reached 1: f = f0 + t,
// so f'' = f0'' exp(-(f0 t + t^2/2)).
double gaussian_tail(double f0, double fpp0) {
  const double a = f0 / std::sqrt(2.0);
  if (a < 20.0) return fpp0 * std::sqrt(M_PI / 2.0) * std::exp(a * a) * std::erfc(a);
  // erfcx asymptotics
  const double inv = 1.0 / (2.0 * a * a);
  return fpp0 * std::sqrt(M_PI / 2.0) / (a * std::sqrt(M_PI)) * (1.0 - inv + 3.0 * inv * inv);
}

}  // namespace

double shoot_target(double s, double z_max, double step) {
  return integrate_fp_end(s, z_max, step_count(z_max, step));
}

BlasiusProfile solve_blasius(double z_max, double step, double shoot_tol, double residual_tol) {
  require(z_max > 0.0 && step > 0.0, ErrorCode::InvalidArgument, "z_max and step must be positive");
  require(shoot_tol > 0.0, ErrorCode::InvalidArgument, "shoot_tol must be positive");
  const Index n = step_count(z_max, step);
  require(n >= 400, ErrorCode::InvalidArgument, "step too coarse: fewer than 400 grid points");

  auto g = [&](double s) { return integrate_fp_end(s, z_max, n) - 1.0; };

  double lo = 0.1, hi = 1.0;
  double g_lo = g(lo), g_hi = g(hi);
  if (!(g_lo < 0.0 && g_hi > 0.0)) {
    std::ostringstream msg;
    msg << "f'(z_max) - 1 does not change sign on s in [0.1, 1.0] (values " << g_lo << ", " << g_hi
        << ") at z_max = " << z_max << "; widen the bracket or lengthen the domain";
    fail(ErrorCode::NoBracket, msg.str());
  }
  require(z_max >= 8.0, ErrorCode::InvalidArgument,
          "z_max < 8 truncates the far-field tail below the grid error");

  // Illinois-modified regula falsi, with bisection whenever the secant point
  // lands too close to an endpoint.
  double s = 0.5 * (lo + hi), gs = 0.0;
  double true_lo = g_lo, true_hi = g_hi;  // unscaled endpoint values for the monotonicity check
  int side = 0, iterations = 0;
  for (; iterations < 200; ++iterations) {
    double candidate = hi - g_hi * (hi - lo) / (g_hi - g_lo);
    const double width = hi - lo;
    if (!(candidate > lo + 1e-3 * width && candidate < hi - 1e-3 * width)) candidate = 0.5 * (lo + hi);
    s = candidate;
    gs = g(s);
    if (!(gs >= true_lo && gs <= true_hi)) {
      std::ostringstream msg;
      msg << "f'(z_max; s) lost monotonicity in s near s = " << s;
      fail(ErrorCode::NonMonotone, msg.str());
    }
    if (std::abs(gs) < shoot_tol || width < 4.0 * std::numeric_limits<double>::epsilon()) break;
    if (gs < 0.0) {
      lo = s;
      g_lo = true_lo = gs;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    } else {
      hi = s;
      g_hi = true_hi = gs;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    }
  }
  require(std::abs(gs) < shoot_tol, ErrorCode::NoConvergence, "shooting did not reach shoot_tol");

  BlasiusProfile p;
  p.b0 = s;
  p.z_max = z_max;
  p.step = z_max / static_cast<double>(n);
  p.shoot_residual = std::abs(gs);
  p.shoot_iterations = iterations + 1;
  p.z_grid.resize(n + 1);
  p.f.resize(n + 1);
  p.fp.resize(n + 1);
  p.fpp.resize(n + 1);
  p.log_rho.resize(n + 1);
  p.tail.resize(n + 1);

  State y{0.0, 0.0, s, 0.0};
  for (Index i = 0; i <= n; ++i) {
    p.z_grid[i] = p.step * static_cast<double>(i);
    p.f[i] = y[0];
    p.fp[i] = y[1];
    p.fpp[i] = y[2];
    p.log_rho[i] = y[3];
    if (i < n) y = rk4(y, p.step);
  }
  p.z_grid[n] = z_max;

  // 1 - f' from the right, integrating f'' with the two-point Hermite rule.
  const double h = p.step;
  p.tail[n] = gaussian_tail(p.f[n], p.fpp[n]);
  for (Index i = n; i-- > 0;) {
    const double fppp_a = -p.f[i] * p.fpp[i];
    const double fppp_b = -p.f[i + 1] * p.fpp[i + 1];
    p.tail[i] = p.tail[i + 1] + 0.5 * h * (p.fpp[i] + p.fpp[i + 1]) + h * h / 12.0 * (fppp_a - fppp_b);
  }

  double residual = 0.0;
  for (Index i = 1; i < n; ++i) {
    const double fppp = (p.fpp[i + 1] - p.fpp[i - 1]) / (2.0 * h);
    residual = std::max(residual, std::abs(fppp + p.f[i] * p.fpp[i]));
  }
  p.ode_residual = residual;
  if (residual > residual_tol) {
    std::ostringstream msg;
    msg << "interior residual " << residual << " exceeds " << residual_tol << " at step " << h;
    fail(ErrorCode::StepTooLarge, msg.str());
  }

  const FarFieldFit fit = fit_far_field(p, 0.6 * z_max, 0.95 * z_max);
  p.n1 = fit.n1;
  p.n2 = fit.n2;
  return p;
}

BlasiusState BlasiusProfile::at(double z) const {
  require(size() > 1, ErrorCode::InvalidArgument, "empty Blasius profile");
  BlasiusState out;
  out.z = z;
  if (z <= 0.0) {
    out.fpp = b0;
    return out;
  }
  const Index n = size() - 1;
  if (z >= z_max) {
    const double t = z - z_max;
    out.f = f[n] + t;
    out.fpp = fpp[n] * std::exp(-(f[n] * t + 0.5 * t * t));
    out.tail = gaussian_tail(out.f, out.fpp);
    out.fp = fp[n] + (tail[n] - out.tail);
    out.log_rho = log_rho[n] + f[n] * t + 0.5 * t * t;
    return out;
  }
  Index k = std::min<Index>(static_cast<Index>(z / step), n - 1);
  const double dz = z - z_grid[k];
  const State y = rk4({f[k], fp[k], fpp[k], log_rho[k]}, dz);
  out.f = y[0];
  out.fp = y[1];
  out.fpp = y[2];
  out.log_rho = y[3];
  // Hermite integral of f'' over [z, z_k+1]
  const double hr = z_grid[k + 1] - z;
  out.tail = tail[k + 1] + 0.5 * hr * (out.fpp + fpp[k + 1]) +
             hr * hr / 12.0 * (out.fppp() + f[k + 1] * fpp[k + 1]);
  return out;
}

double BlasiusProfile::z_of_psi(double psi) const {
  if (psi <= 0.0) return 0.0;
  const double target = psi / std::sqrt(2.0);
  const Index n = size() - 1;
  if (target >= f[n]) {
    // beyond the table f = f(z_max) + (z - z_max) up to the exponentially small tail
    double z = z_max + (target - f[n]);
    for (int it = 0; it < 4; ++it) {
      const BlasiusState s = at(z);
      z -= (s.f - target) / s.fp;
    }
    return z;
  }
  // f is increasing on the table
  const auto* begin = f.data();
  const auto* it = std::upper_bound(begin, begin + n + 1, target);
  Index k = std::max<Index>(static_cast<Index>(it - begin) - 1, 0);
  double lo = z_grid[k], hi = z_grid[std::min(k + 1, n)];
  double z;
  if (k == 0) {
    z = std::min(std::sqrt(2.0 * target / b0), hi);  // f ~ b0 z^2 / 2
  } else {
    z = lo + (target - f[k]) / fp[k];
  }
  for (int iter = 0; iter < 60; ++iter) {
    const BlasiusState s = at(z);
    const double r = s.f - target;
    if (r > 0.0) hi = z; else lo = z;
    double next = (s.fp > 0.0) ? z - r / s.fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-15 * std::max(1.0, z)) {
      z = next;
      break;
    }
    z = next;
  }
  return z;
}

double FarFieldFit::predict(double z) const {
  return n1 * std::pow(z, -power) * std::exp(-0.5 * z * z - n2 * z);
}

FarFieldFit fit_far_field(const BlasiusProfile& profile, double z_lo, double z_hi) {
  const double zm = profile.z_max;
  require(z_lo < z_hi && z_lo >= 0.6 * zm - 1e-12 && z_hi <= 0.95 * zm + 1e-12, ErrorCode::InvalidArgument,
          "far-field window must lie inside [0.6 z_max, 0.95 z_max]");
  std::vector<Index> rows;
  for (Index i = 0; i < profile.size(); ++i) {
    const double z = profile.z_grid[i];
    if (z < z_lo || z > z_hi) continue;
    if (!(profile.tail[i] > 1e3 * std::numeric_limits<double>::min())) {
      fail(ErrorCode::Underflow, "1 - f' vanishes to machine zero inside the fit window");
    }
    rows.push_back(i);
  }
  require(rows.size() >= 3, ErrorCode::InvalidArgument, "fit window holds fewer than 3 samples");

  Eigen::MatrixXd design(static_cast<Index>(rows.size()), 3);
  Vector rhs(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double z = profile.z_grid[rows[r]];
    const Index ri = static_cast<Index>(r);
    design(ri, 0) = -std::log(z);
    design(ri, 1) = -z;
    design(ri, 2) = 1.0;
    rhs[ri] = std::log(profile.tail[rows[r]]) + 0.5 * z * z;
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  FarFieldFit fit;
  fit.power = coef[0];
  fit.n2 = coef[1];
  fit.n1 = std::exp(coef[2]);
  fit.samples = static_cast<Index>(rows.size());
  fit.rms_residual = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<double>(rows.size()));
  return fit;
}

}  // namespace prandtl
