#pragma once

#include <memory>
#include <optional>

#include "prandtl/blasius.hpp"
#include "prandtl/fields.hpp"

namespace prandtl {

using BlasiusPtr = std::shared_ptr<const BlasiusProfile>;

/// The Blasius flow as a stationary state of the omega equation, with
/// every quantity evaluated through z(psi):
///   wbar = f'^2,  wbar_p = sqrt(2) f'',  wbar_pp = -f f'' / f',
///   log rho = int_0^z f.
struct SelfSimilarSample {
  double psi = 0.0;
  double z = 0.0;
  double wbar = 0.0;
  double wbar_p = 0.0;
  double wbar_pp = 0.0;
  double rho = 1.0;
  double one_minus_wbar = 1.0;

  /// -wbar_pp / (2 sqrt(wbar)) written as psi wbar_p / (4 wbar); tends to 1/4 at the wall.
  double reaction = 0.25;
};

/// Tabulated profile on a psi-grid.
///
/// `a_weight` = rho / sqrt(wbar) is singular like psi^(-1/2) at the wall;
/// its entry at psi = 0 is +inf and must not be used arithmetically.
/// Quadratures against A use `a_mass`, whose first cell is integrated
/// with A ~ A(psi_1) (psi_1 / psi)^(1/2).
struct SelfSimilarProfile {
  BlasiusPtr blasius;
  GridPtr grid;
  Vector wbar;
  Vector wbar_p;
  Vector wbar_pp;
  Vector rho;
  Vector a_weight;
  Vector a_mass;
  Vector reaction;
  double psi_max = 0.0;
  double b0 = 0.0;

  SelfSimilarSample eval(double psi) const;
};

SelfSimilarSample evaluate_self_similar(const BlasiusProfile& blasius, double psi);

/// Smallest psi with 1 - wbar(psi) <= tail_tol.
double psi_for_tail(const BlasiusProfile& blasius, double tail_tol);

SelfSimilarProfile build_self_similar(BlasiusPtr blasius, GridPtr grid);

struct WeightSample {
  double rho = 1.0;
  std::optional<double> a_weight;  // empty at psi = 0
  double a_wall_coeff = 0.0;       // A ~ a_wall_coeff * psi^(-1/2) near the wall
};

WeightSample weights_at(const SelfSimilarProfile& profile, double psi);

/// Exact omega for the shifted family u = f'(y / sqrt(2 (x + s))) in the
/// coordinates xi = ln(x + d): omega(xi, psi) = wbar(psi sqrt((x + d) / (x + s))).
OmegaField shifted_blasius_field(const BlasiusProfile& blasius, GridPtr grid, double s, double d, double xi);

}  // namespace prandtl
