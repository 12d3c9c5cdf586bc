#pragma once

#include <Eigen/Core>

namespace prandtl {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Pointwise Blasius state at similarity coordinate z.
///
/// `log_rho` is the running integral of f, which equals log of the
/// energy weight rho once z is mapped to the stream coordinate
/// psi = sqrt(2) f(z). `tail` is 1 - f', carried separately so that it
/// keeps relative accuracy long after f' has rounded to 1.
struct BlasiusState {
  double z = 0.0;
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
  double log_rho = 0.0;
  double tail = 1.0;

  double fppp() const { return -f * fpp; }
};

/// Tabulated solution of f''' + f f'' = 0, f(0) = f'(0) = 0, f'(inf) = 1.
struct BlasiusProfile {
  Vector z_grid;
  Vector f;
  Vector fp;
  Vector fpp;
  Vector log_rho;
  Vector tail;
  double b0 = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
  double z_max = 0.0;
  double step = 0.0;
  double shoot_residual = 0.0;  // |f'(z_max) - 1|
  double ode_residual = 0.0;    // max interior |f''' + f f''| by centered differences
  int shoot_iterations = 0;

  Index size() const { return z_grid.size(); }

  /// Dense evaluation. Inside the table a partial RK4 step is taken from the
  /// nearest lower node; beyond z_max the solution continues with f' = 1 and
  /// the exponentially small f'' tail.
  BlasiusState at(double z) const;

  /// Largest z for which psi = sqrt(2) f(z) is still <= psi.
  double z_of_psi(double psi) const;
};

/// Shooting solve on [0, z_max] with a fixed-step RK4 integrator.
/// The root search on s = f''(0) starts from the bracket [0.1, 1.0].
BlasiusProfile solve_blasius(double z_max = 10.0, double step = 1e-3, double shoot_tol = 1e-10,
                             double residual_tol = 1e-6);

/// f'(z_max) for a given wall curvature s; used by the shooting loop and by tests.
double shoot_target(double s, double z_max, double step);

struct FarFieldFit {
  double n1 = 0.0;
  double n2 = 0.0;
  double power = 0.0;  // coefficient of -log z, asymptotically 1
  double rms_residual = 0.0;
  Index samples = 0;

  /// Fitted 1 - f'(z).
  double predict(double z) const;
};

/// Least squares fit of log(1 - f') + z^2/2 against {-log z, -z, 1}.
/// The window must lie inside [0.6 z_max, 0.95 z_max].
FarFieldFit fit_far_field(const BlasiusProfile& profile, double z_lo, double z_hi);

}  // namespace prandtl
