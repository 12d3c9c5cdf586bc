#pragma once

#include <Eigen/Core>

namespace prandtl {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Strictly increasing stream-coordinate nodes 0 = psi_0 < ... < psi_J.
///
/// Computational grids come from `clustered`, which places a geometric
/// progression of cells against the wall so that the first spacing is at
/// most psi_max / 10^4. `refined` inserts one node per cell; on a geometric
/// grid the new nodes continue the same exponential map, so successive
/// refinements are nested and smoothly graded.
class PsiGrid {
 public:
  explicit PsiGrid(Vector nodes, double ratio = 0.0);

  static PsiGrid uniform(double psi_max, Index cells);
  static PsiGrid geometric(double psi_max, Index cells, double ratio);
  static PsiGrid clustered(double psi_max, Index cells, double first_fraction = 1e-4);

  /// Geometric ratio giving a first cell of `first_fraction * psi_max`.
  static double ratio_for(Index cells, double first_fraction);

  PsiGrid refined() const;

  const Vector& nodes() const { return nodes_; }
  const Vector& spacing() const { return spacing_; }
  double operator[](Index i) const { return nodes_[i]; }
  Index cells() const { return nodes_.size() - 1; }
  Index size() const { return nodes_.size(); }
  double psi_max() const { return nodes_[nodes_.size() - 1]; }
  double ratio() const { return ratio_; }

  /// J >= 64 and first spacing <= psi_max * 1e-4.
  bool wall_clustered() const;

 private:
  Vector nodes_;
  Vector spacing_;
  double ratio_ = 0.0;
};

}  // namespace prandtl
