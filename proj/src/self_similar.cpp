#include "prandtl/self_similar.hpp"

#include <cmath>
#include <limits>

#include "prandtl/errors.hpp"

namespace prandtl {

SelfSimilarSample evaluate_self_similar(const BlasiusProfile& blasius, double psi) {
  SelfSimilarSample s;
  s.psi = psi;
  if (psi <= 0.0) {
    s.wbar_p = std::sqrt(2.0) * blasius.b0;
    return s;
  }
  const double z = blasius.z_of_psi(psi);
  const BlasiusState st = blasius.at(z);
  s.z = z;
  s.wbar = st.fp * st.fp;
  s.one_minus_wbar = st.tail * (2.0 - st.tail);
  s.wbar_p = std::sqrt(2.0) * st.fpp;
  s.wbar_pp = -st.f * st.fpp / st.fp;
  s.rho = std::exp(st.log_rho);
  s.reaction = st.f * st.fpp / (2.0 * st.fp * st.fp);
  return s;
}

SelfSimilarSample SelfSimilarProfile::eval(double psi) const { return evaluate_self_similar(*blasius, psi); }

double psi_for_tail(const BlasiusProfile& blasius, double tail_tol) {
  require(tail_tol > 0.0 && tail_tol < 1.0, ErrorCode::InvalidArgument, "tail_tol must lie in (0, 1)");
  // 1 - f'^2 = tail (2 - tail) decreases in z
  double lo = 0.0, hi = blasius.z_max;
  auto gap = [&](double z) {
    const BlasiusState st = blasius.at(z);
    return st.tail * (2.0 - st.tail);
  };
  require(gap(hi) <= tail_tol, ErrorCode::InvalidArgument, "tail_tol not reached before z_max");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > tail_tol) lo = mid; else hi = mid;
  }
  return std::sqrt(2.0) * blasius.at(hi).f;
}

SelfSimilarProfile build_self_similar(BlasiusPtr blasius, GridPtr grid) {
  require(blasius != nullptr && grid != nullptr, ErrorCode::InvalidArgument, "missing profile or grid");
  const double psi_top = std::sqrt(2.0) * blasius->f[blasius->size() - 1];
  require(grid->psi_max() <= psi_top * (1.0 + 1e-12), ErrorCode::InvalidArgument,
          "psi_max exceeds sqrt(2) f(z_max)");
  const Index n = grid->size();
  SelfSimilarProfile p;
  p.blasius = blasius;
  p.grid = grid;
  p.psi_max = grid->psi_max();
  p.b0 = blasius->b0;
  p.wbar.resize(n);
  p.wbar_p.resize(n);
  p.wbar_pp.resize(n);
  p.rho.resize(n);
  p.a_weight.resize(n);
  p.reaction.resize(n);

  double last_z = -1.0;
  for (Index j = 0; j < n; ++j) {
    const SelfSimilarSample s = evaluate_self_similar(*blasius, (*grid)[j]);
    if (j > 0 && !(s.z > last_z)) fail(ErrorCode::NonMonotone, "psi(z) inversion is not monotone");
    last_z = s.z;
    p.wbar[j] = s.wbar;
    p.wbar_p[j] = s.wbar_p;
    p.wbar_pp[j] = s.wbar_pp;
    p.rho[j] = s.rho;
    p.reaction[j] = s.reaction;
    p.a_weight[j] = j == 0 ? std::numeric_limits<double>::infinity() : s.rho / std::sqrt(s.wbar);
  }

  const Vector& h = grid->spacing();
  p.a_mass = Vector::Zero(n);
  p.a_mass[0] += 4.0 / 3.0 * p.a_weight[1] * h[0];
  p.a_mass[1] += 2.0 / 3.0 * p.a_weight[1] * h[0];
  for (Index k = 1; k + 1 < n; ++k) {
    p.a_mass[k] += 0.5 * h[k] * p.a_weight[k];
    p.a_mass[k + 1] += 0.5 * h[k] * p.a_weight[k + 1];
  }
  return p;
}

WeightSample weights_at(const SelfSimilarProfile& profile, double psi) {
  require(psi >= 0.0 && psi <= profile.psi_max, ErrorCode::OutOfRange, "psi outside [0, psi_max]");
  WeightSample w;
  w.a_wall_coeff = 1.0 / std::sqrt(std::sqrt(2.0) * profile.b0);
  if (psi == 0.0) return w;
  const SelfSimilarSample s = profile.eval(psi);
  w.rho = s.rho;
  w.a_weight = s.rho / std::sqrt(s.wbar);
  return w;
}

OmegaField shifted_blasius_field(const BlasiusProfile& blasius, GridPtr grid, double s, double d, double xi) {
  require(s > 0.0 && d > 0.0, ErrorCode::InvalidArgument, "shifts must be positive");
  const double x = std::exp(xi) - d;
  require(x + s > 0.0, ErrorCode::InvalidArgument, "x + s must be positive");
  const double stretch = std::sqrt((x + d) / (x + s));
  OmegaField field;
  field.grid = grid;
  field.xi = xi;
  field.d_shift = d;
  field.values.resize(grid->size());
  for (Index j = 0; j < grid->size(); ++j) {
    field.values[j] = evaluate_self_similar(blasius, (*grid)[j] * stretch).wbar;
  }
  field.values[0] = 0.0;
  return field;
}

}  // namespace prandtl
