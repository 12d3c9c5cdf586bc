#pragma once

#include <Eigen/Core>

#include <cmath>

#include "prandtl/errors.hpp"

namespace prandtl {

/// Tridiagonal system in diagonal storage. Row i reads
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i],
/// with lower[0] and upper[n-1] ignored.
template <typename Scalar>
struct Tridiagonal {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vec lower;
  Vec diag;
  Vec upper;

  Tridiagonal() = default;
  explicit Tridiagonal(Eigen::Index n) : lower(Vec::Zero(n)), diag(Vec::Zero(n)), upper(Vec::Zero(n)) {}

  Eigen::Index size() const { return diag.size(); }

  template <typename Derived>
  Vec apply(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::Index n = size();
    Vec out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      out[i] = s;
    }
    return out;
  }

  /// |diag| >= |lower| + |upper| on every row.
  bool diagonally_dominant() const {
    const Eigen::Index n = size();
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar off = 0;
      if (i > 0) off += std::abs(lower[i]);
      if (i + 1 < n) off += std::abs(upper[i]);
      if (std::abs(diag[i]) < off) return false;
    }
    return true;
  }
};

/// Thomas algorithm without pivoting.
template <typename Scalar, typename Derived>
typename Tridiagonal<Scalar>::Vec thomas_solve(const Tridiagonal<Scalar>& m, const Eigen::MatrixBase<Derived>& rhs) {
  using Vec = typename Tridiagonal<Scalar>::Vec;
  const Eigen::Index n = m.size();
  require(rhs.size() == n && n > 0, ErrorCode::InvalidArgument, "tridiagonal size mismatch");
  Vec c(n), d(n);
  Scalar piv = m.diag[0];
  if (!(std::abs(piv) > 0) || !std::isfinite(piv)) fail(ErrorCode::SolveFailed, "zero pivot in row 0");
  c[0] = m.upper[0] / piv;
  d[0] = rhs[0] / piv;
  for (Eigen::Index i = 1; i < n; ++i) {
    piv = m.diag[i] - m.lower[i] * c[i - 1];
    if (!(std::abs(piv) > 0) || !std::isfinite(piv)) fail(ErrorCode::SolveFailed, "zero pivot in tridiagonal solve");
    c[i] = (i + 1 < n) ? m.upper[i] / piv : Scalar(0);
    d[i] = (rhs[i] - m.lower[i] * d[i - 1]) / piv;
  }
  Vec x(n);
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace prandtl
