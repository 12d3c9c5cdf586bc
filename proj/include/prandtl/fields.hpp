#pragma once

#include <Eigen/Core>

#include <cassert>
#include <memory>
#include <string>

#include "prandtl/grid.hpp"

namespace prandtl {

using GridPtr = std::shared_ptr<const PsiGrid>;

/// omega(xi, psi_j) = u^2 in modified von Mises coordinates xi = ln(x + d).
struct OmegaField {
  GridPtr grid;
  Vector values;
  double xi = 0.0;
  double d_shift = 1.0;

  double x() const;
};

/// Tabulated physical inlet profile u0(y), outer flow normalized to 1.
struct InitialProfile {
  Vector y_samples;
  Vector u_samples;
  double decay_eps = 0.0;

  /// Piecewise-linear u0; 1 beyond the last sample.
  double u_at(double y) const;
};

/// Checks u0(0) = 0, u0 > 0 for y > 0 and the far-field tail.
void validate(const InitialProfile& profile, double tail_tol = 1e-3);

/// CSV with header `y,u0`.
InitialProfile read_initial_csv(const std::string& path);

/// Maps u0(y) to omega0(psi) with psi(y) = int_0^y u0 / sqrt(d). The
/// stream function is integrated exactly for the piecewise-linear u0, so
/// the inverse map y(psi) is the root of a quadratic on each sample cell.
OmegaField ingest_initial(const InitialProfile& profile, double d_shift, GridPtr grid);

/// First derivative with nonuniform three-point stencils; one-sided
/// second-order at both ends.
template <typename Derived>
Vector d1(const Eigen::MatrixBase<Derived>& values, const PsiGrid& grid) {
  const Index n = grid.size();
  assert(values.size() == n && n >= 3);
  const Vector& h = grid.spacing();
  Vector out(n);
  for (Index j = 1; j + 1 < n; ++j) {
    const double hm = h[j - 1], hp = h[j];
    out[j] = (-hp / (hm * (hm + hp))) * values[j - 1] + ((hp - hm) / (hm * hp)) * values[j] +
             (hm / (hp * (hm + hp))) * values[j + 1];
  }
  {
    const double a = h[0], b = h[1];
    out[0] = -(2.0 * a + b) / (a * (a + b)) * values[0] + (a + b) / (a * b) * values[1] -
             a / (b * (a + b)) * values[2];
  }
  {
    const double a = h[n - 2], b = h[n - 3];
    out[n - 1] = (2.0 * a + b) / (a * (a + b)) * values[n - 1] - (a + b) / (a * b) * values[n - 2] +
                 a / (b * (a + b)) * values[n - 3];
  }
  return out;
}

/// Second derivative; the end values reuse the parabola through the three
/// nodes nearest the boundary.
template <typename Derived>
Vector d2(const Eigen::MatrixBase<Derived>& values, const PsiGrid& grid) {
  const Index n = grid.size();
  assert(values.size() == n && n >= 3);
  const Vector& h = grid.spacing();
  Vector out(n);
  for (Index j = 1; j + 1 < n; ++j) {
    const double hm = h[j - 1], hp = h[j];
    out[j] = 2.0 * (values[j + 1] / (hp * (hm + hp)) - values[j] / (hm * hp) + values[j - 1] / (hm * (hm + hp)));
  }
  out[0] = out[1];
  out[n - 1] = out[n - 2];
  return out;
}

/// Trapezoid node weights: sum_j w_j g_j approximates int g dpsi.
Vector trapezoid_weights(const PsiGrid& grid);

enum class NormKind { Linf, L2 };

/// L2: sqrt(int weight * value^2) by the trapezoid rule. Linf: max |value|,
/// the weight is ignored (sup norms are unweighted).
double weighted_norm(const Vector& values, const Vector& weight, const PsiGrid& grid, NormKind kind);

/// L2 norm with precomputed node quadrature weights (used for the
/// singular A weight, whose first-cell integral is done analytically).
double quadrature_norm(const Vector& values, const Vector& node_weights);

}  // namespace prandtl
