#include "prandtl/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "prandtl/errors.hpp"

namespace prandtl {

double OmegaField::x() const { return std::exp(xi) - d_shift; }

double InitialProfile::u_at(double y) const {
  const Index n = y_samples.size();
  if (y <= y_samples[0]) return u_samples[0];
  if (y >= y_samples[n - 1]) return 1.0;
  const auto* b = y_samples.data();
  const Index k = static_cast<Index>(std::upper_bound(b, b + n, y) - b) - 1;
  const double t = (y - y_samples[k]) / (y_samples[k + 1] - y_samples[k]);
  return (1.0 - t) * u_samples[k] + t * u_samples[k + 1];
}

void validate(const InitialProfile& p, double tail_tol) {
  const Index n = p.y_samples.size();
  require(n >= 3 && p.u_samples.size() == n, ErrorCode::InvalidArgument, "initial profile needs >= 3 samples");
  require(p.y_samples[0] == 0.0, ErrorCode::InvalidArgument, "initial profile must start at y = 0");
  require(std::abs(p.u_samples[0]) == 0.0, ErrorCode::InvalidArgument, "u0(0) must be 0");
  for (Index i = 1; i < n; ++i) {
    require(p.y_samples[i] > p.y_samples[i - 1], ErrorCode::InvalidArgument, "y samples must increase");
    require(p.u_samples[i] > 0.0, ErrorCode::NonMonotoneStream, "u0 must be positive for y > 0");
  }
  require(std::abs(p.u_samples[n - 1] - 1.0) <= tail_tol, ErrorCode::InvalidArgument,
          "u0 has not reached the outer flow at the last sample");
}

InitialProfile read_initial_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "y,u0", ErrorCode::ConfigError, "initial profile header must be `y,u0` in " + path);
  std::vector<double> ys, us;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double y = 0.0, u = 0.0;
    char comma = 0;
    if (!(row >> y >> comma >> u) || comma != ',') fail(ErrorCode::ConfigError, "malformed row `" + line + "`");
    ys.push_back(y);
    us.push_back(u);
  }
  InitialProfile p;
  p.y_samples = Eigen::Map<Vector>(ys.data(), static_cast<Index>(ys.size()));
  p.u_samples = Eigen::Map<Vector>(us.data(), static_cast<Index>(us.size()));
  return p;
}

OmegaField ingest_initial(const InitialProfile& profile, double d_shift, GridPtr grid) {
  require(d_shift > 0.0, ErrorCode::InvalidArgument, "d must be positive");
  require(grid != nullptr, ErrorCode::InvalidArgument, "missing grid");
  const Vector& y = profile.y_samples;
  const Vector& u = profile.u_samples;
  const Index n = y.size();
  require(n >= 2 && u.size() == n, ErrorCode::InvalidArgument, "initial profile needs samples");
  const double scale = 1.0 / std::sqrt(d_shift);

  Vector stream(n);
  stream[0] = 0.0;
  for (Index k = 0; k + 1 < n; ++k) {
    stream[k + 1] = stream[k] + 0.5 * (u[k] + u[k + 1]) * (y[k + 1] - y[k]) * scale;
    if (!(stream[k + 1] > stream[k])) {
      fail(ErrorCode::NonMonotoneStream, "psi(y) is not strictly increasing near y = " + std::to_string(y[k]));
    }
  }

  OmegaField field;
  field.grid = grid;
  field.d_shift = d_shift;
  field.xi = std::log(d_shift);
  field.values.resize(grid->size());
  const double* sb = stream.data();
  for (Index j = 0; j < grid->size(); ++j) {
    const double psi = (*grid)[j];
    if (psi <= 0.0) {
      field.values[j] = 0.0;
      continue;
    }
    if (psi >= stream[n - 1]) {
      field.values[j] = 1.0;
      continue;
    }
    const Index k = static_cast<Index>(std::upper_bound(sb, sb + n, psi) - sb) - 1;
    const double h = y[k + 1] - y[k];
    const double slope = (u[k + 1] - u[k]) / h;
    // (psi - stream_k) / scale = u_k t + slope t^2 / 2
    const double target = (psi - stream[k]) / scale;
    const double disc = std::max(u[k] * u[k] + 2.0 * slope * target, 0.0);
    double t = 2.0 * target / (u[k] + std::sqrt(disc));
    t = std::clamp(t, 0.0, h);
    const double uu = u[k] + slope * t;
    field.values[j] = uu * uu;
  }
  field.values[grid->size() - 1] = 1.0;
  return field;
}

Vector trapezoid_weights(const PsiGrid& grid) {
  const Vector& h = grid.spacing();
  Vector w = Vector::Zero(grid.size());
  w.head(h.size()) += 0.5 * h;
  w.tail(h.size()) += 0.5 * h;
  return w;
}

double weighted_norm(const Vector& values, const Vector& weight, const PsiGrid& grid, NormKind kind) {
  assert(values.size() == grid.size() && weight.size() == grid.size());
  if (kind == NormKind::Linf) return values.cwiseAbs().maxCoeff();
  const Vector w = trapezoid_weights(grid);
  return std::sqrt((w.array() * weight.array() * values.array().square()).sum());
}

double quadrature_norm(const Vector& values, const Vector& node_weights) {
  assert(values.size() == node_weights.size());
  return std::sqrt((node_weights.array() * values.array().square()).sum());
}

}  // namespace prandtl
