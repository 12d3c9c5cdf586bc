#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "prandtl/self_similar.hpp"
#include "prandtl/tridiagonal.hpp"

namespace prandtl {

/// Pencil (K, M) for the weighted operator
///   T v = -(rho v')' + r A v,   r = -wbar_pp / (2 sqrt(wbar)) = psi wbar_p / (4 wbar),
/// on the interior nodes 1..J-1 of a psi-grid, with v = 0 at both ends.
/// The flux part is a finite-volume form with rho at cell midpoints; reaction
/// and mass are lumped with the A-weighted node measure `a_mass`.
struct OperatorMatrices {
  GridPtr grid;
  Tridiagonal<double> stiffness;  // size J-1
  Vector mass;                    // size J-1, A-weighted node measure
  Vector face_rho;                // size J, rho at cell midpoints
  Vector node_mass;               // size J+1
  Vector node_reaction;           // size J+1, r at nodes

  Index interior() const { return mass.size(); }
};

/// Assembly from precomputed coefficients: rho at faces, A-weighted node
/// measure and the reaction factor r at nodes.
OperatorMatrices assemble_from_coefficients(GridPtr grid, const Vector& face_rho, const Vector& node_mass,
                                            const Vector& node_reaction);

OperatorMatrices assemble(const SelfSimilarProfile& profile);

struct EigenResult {
  double lambda1 = 0.0;
  Vector eigvec;  // all J+1 nodes, zero at both ends, M-norm 1, positive
  double rq = 0.0;
  double residual = 0.0;  // ||K e - lambda M e||_{M^-1} / ||M e||_{M^-1}
  int iters = 0;
  double psi_max = 0.0;
  GridPtr grid;
  std::vector<std::pair<Index, double>> refine_history;
};

/// Shifted inverse iteration on (K - shift M) y = M x. Stops when successive
/// Rayleigh quotients differ by less than tol and the relative residual is
/// below 10 tol.
EigenResult principal_eigen(const OperatorMatrices& mats, double tol = 1e-10, double shift = 0.5,
                            int max_iters = 500);

/// Inverse iteration restricted to the M-orthogonal complement of `lower`
/// (full-node vectors); used for the second eigenpair.
EigenResult deflated_eigen(const OperatorMatrices& mats, const std::vector<Vector>& lower, double tol = 1e-10,
                           double shift = 0.5, int max_iters = 500);

/// F(v) = (sum rho_f (dv)^2 / h + sum r m v^2) / sum m v^2 for a full-node
/// vector with v(0) = 0; the last node enters like any other.
double rayleigh(const OperatorMatrices& mats, const Vector& v);

/// F(v) - 1.
double coercivity_gap(const OperatorMatrices& mats, const Vector& v);

/// (K v)_j / m_j at interior nodes, zero at the ends: the discrete L.
Vector apply_operator(const OperatorMatrices& mats, const Vector& v);

/// Random admissible vectors (zero at both ends) for property sweeps. Three
/// kinds alternate: smoothed nonnegative noise, the eigenfunction candidate
/// under a random smooth modulation, and random sine combinations.
std::vector<Vector> admissible_battery(const SelfSimilarProfile& profile, int count, std::uint64_t seed,
                                       bool nonnegative = false);

/// psi wbar_p at the nodes of the profile grid.
Vector eigenfunction_candidate(const SelfSimilarProfile& profile);

struct HardyCheck {
  double lhs = 0.0;  // int (1 + psi)^2 rho v^2 / wbar^2
  double rhs = 0.0;  // int rho v'^2
  double ratio = 0.0;
};

/// Both sides by node/cell quadrature; the wall value of v / wbar is the
/// slope ratio v'(0) / wbar_p(0). v must vanish at psi = 0 and on the last
/// five nodes.
HardyCheck check_hardy(const SelfSimilarProfile& profile, const Vector& v);

/// Grid-independent Hardy test functions psi^a e^{-b psi^2} c(psi) with
/// random a in [1, 2], b in [0.05, 1] and a smooth cutoff c that vanishes
/// beyond cut * psi_max. Same seed, same functions on every grid.
std::vector<Vector> hardy_battery(const PsiGrid& grid, int count, std::uint64_t seed, double cut = 0.8);

/// int_{psi_max}^inf A (psi wbar_p)^2 dpsi over the same integral from 0,
/// computed in z with dpsi = sqrt(2) f' dz.
double tail_weight_ratio(const BlasiusProfile& blasius, double psi_max);

/// Truncation for the eigenproblem: the larger of the tail_tol point and the
/// point where tail_weight_ratio drops below mass_tol.
double spectral_psi_max(const BlasiusProfile& blasius, double tail_tol = 1e-3, double mass_tol = 1e-10);

/// Principal eigenpair on `cells` and on `levels` nested refinements of the
/// clustered grid; independent levels are solved concurrently. The returned
/// result belongs to the finest level and carries the whole history.
EigenResult eigen_refinement(BlasiusPtr blasius, double psi_max, Index cells, int levels, double tol = 1e-10,
                             double shift = 0.5, int max_iters = 500);

}  // namespace prandtl
