#include "prandtl/initial_data.hpp"

#include <cmath>

#include "prandtl/errors.hpp"

namespace prandtl {

std::function<double(double)> analytic_inlet(const InitialSpec& spec, const BlasiusProfile& blasius) {
  const BlasiusProfile* b = &blasius;
  if (spec.kind == "equilibrium") {
    const double scale = std::sqrt(2.0 * spec.d);
    return [b, scale](double y) { return b->at(y / scale).fp; };
  }
  if (spec.kind == "shifted") {
    const double scale = std::sqrt(2.0 * spec.s);
    return [b, scale](double y) { return b->at(y / scale).fp; };
  }
  if (spec.kind == "tanh") return [](double y) { return std::tanh(y); };
  if (spec.kind == "erf") return [](double y) { return std::erf(y); };
  return {};
}

InitialProfile sample_inlet(const std::function<double(double)>& u0, double y_max, Index samples) {
  require(static_cast<bool>(u0) && y_max > 0.0 && samples >= 3, ErrorCode::InvalidArgument, "bad inlet sampling");
  InitialProfile p;
  p.y_samples.resize(samples);
  p.u_samples.resize(samples);
  for (Index i = 0; i < samples; ++i) {
    const double y = y_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    p.y_samples[i] = y;
    p.u_samples[i] = u0(y);
  }
  p.u_samples[0] = 0.0;
  p.u_samples[samples - 1] = 1.0;
  return p;
}

OmegaField initial_field(const InitialSpec& spec, const SelfSimilarProfile& profile) {
  require(spec.d > 0.0, ErrorCode::InvalidArgument, "d must be positive");
  const GridPtr grid = profile.grid;
  const Index last = grid->size() - 1;
  const double xi0 = std::log(spec.d);
  OmegaField w;
  w.grid = grid;
  w.xi = xi0;
  w.d_shift = spec.d;
  if (spec.kind == "equilibrium") {
    w.values = profile.wbar;
  } else if (spec.kind == "shifted") {
    w = shifted_blasius_field(*profile.blasius, grid, spec.s, spec.d, xi0);
  } else if (spec.kind == "scaled") {
    w.values = spec.scale * profile.wbar;
  } else if (spec.kind == "convex") {
    w.values = (grid->nodes() / grid->psi_max()).cwiseAbs2();
  } else if (spec.kind == "tanh" || spec.kind == "erf") {
    const InitialProfile p = sample_inlet(analytic_inlet(spec, *profile.blasius), 40.0, 8001);
    w = ingest_initial(p, spec.d, grid);
  } else if (spec.kind == "csv") {
    const InitialProfile p = read_initial_csv(spec.csv);
    validate(p);
    w = ingest_initial(p, spec.d, grid);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown initial kind `" + spec.kind + "`");
  }
  w.values[0] = 0.0;
  w.values[last] = 1.0;
  return w;
}

}  // namespace prandtl
