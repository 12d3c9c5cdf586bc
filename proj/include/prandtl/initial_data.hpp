#pragma once

#include <functional>
#include <string>

#include "prandtl/fields.hpp"
#include "prandtl/self_similar.hpp"

namespace prandtl {

struct InitialSpec {
  std::string kind = "equilibrium";  // equilibrium, shifted, scaled, tanh, erf, convex, csv
  double s = 4.0;
  double d = 1.0;
  double scale = 0.9;
  std::string csv;
};

/// Closed-form inlet u0(y) for kinds defined in physical space
/// (equilibrium, shifted, tanh, erf); empty otherwise. The returned function
/// keeps a reference to `blasius`.
std::function<double(double)> analytic_inlet(const InitialSpec& spec, const BlasiusProfile& blasius);

/// Uniform samples of u0 on [0, y_max]; the last sample is set to 1.
InitialProfile sample_inlet(const std::function<double(double)>& u0, double y_max, Index samples);

/// omega at xi = ln d on the profile's grid. Blasius-based kinds use the
/// exact psi-space form; tanh, erf and csv go through `ingest_initial`;
/// scaled is scale * wbar and convex is (psi / psi_max)^2, both with omega_J = 1.
OmegaField initial_field(const InitialSpec& spec, const SelfSimilarProfile& profile);

}  // namespace prandtl
