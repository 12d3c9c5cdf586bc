#include "prandtl/grid.hpp"

#include <cmath>

#include "prandtl/errors.hpp"

namespace prandtl {

PsiGrid::PsiGrid(Vector nodes, double ratio) : nodes_(std::move(nodes)), ratio_(ratio) {
  require(nodes_.size() >= 3, ErrorCode::InvalidArgument, "grid needs at least 3 nodes");
  require(nodes_[0] == 0.0, ErrorCode::InvalidArgument, "grid must start at psi = 0");
  spacing_ = nodes_.tail(nodes_.size() - 1) - nodes_.head(nodes_.size() - 1);
  require((spacing_.array() > 0.0).all(), ErrorCode::InvalidArgument, "grid nodes must be strictly increasing");
}

PsiGrid PsiGrid::uniform(double psi_max, Index cells) {
  require(psi_max > 0.0 && cells >= 2, ErrorCode::InvalidArgument, "bad uniform grid");
  Vector x = Vector::LinSpaced(cells + 1, 0.0, psi_max);
  x[cells] = psi_max;
  return PsiGrid(std::move(x), 1.0);
}

PsiGrid PsiGrid::geometric(double psi_max, Index cells, double ratio) {
  require(psi_max > 0.0 && cells >= 2 && ratio >= 1.0, ErrorCode::InvalidArgument, "bad geometric grid");
  if (ratio == 1.0) return uniform(psi_max, cells);
  Vector x(cells + 1);
  const double denom = std::expm1(static_cast<double>(cells) * std::log(ratio));
  for (Index j = 0; j <= cells; ++j) {
    x[j] = psi_max * std::expm1(static_cast<double>(j) * std::log(ratio)) / denom;
  }
  x[cells] = psi_max;
  return PsiGrid(std::move(x), ratio);
}

double PsiGrid::ratio_for(Index cells, double first_fraction) {
  require(cells >= 2 && first_fraction > 0.0, ErrorCode::InvalidArgument, "bad clustering request");
  const double n = static_cast<double>(cells);
  if (first_fraction >= 1.0 / n) return 1.0;
  // (r - 1) / (r^n - 1) = first_fraction, solved for log r by bisection
  auto frac = [n](double lr) { return std::expm1(lr) / std::expm1(n * lr); };
  double lo = 1e-14, hi = 50.0 / n;
  while (frac(hi) > first_fraction) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (frac(mid) > first_fraction) lo = mid; else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

PsiGrid PsiGrid::clustered(double psi_max, Index cells, double first_fraction) {
  return geometric(psi_max, cells, ratio_for(cells, first_fraction));
}

PsiGrid PsiGrid::refined() const {
  const Index n = cells();
  Vector x(2 * n + 1);
  const double sub = ratio_ > 0.0 ? std::sqrt(ratio_) : 1.0;
  for (Index j = 0; j < n; ++j) {
    x[2 * j] = nodes_[j];
    // keeps the geometric progression when the parent grid is geometric
    x[2 * j + 1] = nodes_[j] + spacing_[j] / (1.0 + sub);
  }
  x[2 * n] = nodes_[n];
  return PsiGrid(std::move(x), ratio_ > 0.0 ? sub : 0.0);
}

bool PsiGrid::wall_clustered() const {
  return cells() >= 64 && spacing_[0] <= 1e-4 * psi_max() * (1.0 + 1e-12);
}

}  // namespace prandtl
