#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "prandtl/spectral.hpp"

using namespace prandtl;

namespace {

BlasiusPtr blasius10() {
  static BlasiusPtr p = std::make_shared<const BlasiusProfile>(solve_blasius(10.0, 1e-3));
  return p;
}

double spectral_psi() {
  static const double v = spectral_psi_max(*blasius10(), 1e-3, 1e-10);
  return v;
}

const SelfSimilarProfile& profile_at(Index cells) {
  static std::map<Index, SelfSimilarProfile> cache;
  auto it = cache.find(cells);
  if (it == cache.end()) {
    auto grid = std::make_shared<const PsiGrid>(PsiGrid::clustered(spectral_psi(), cells));
    it = cache.emplace(cells, build_self_similar(blasius10(), grid)).first;
  }
  return it->second;
}

// toy problem: wbar = 1, rho = exp(psi^2 / 4), no reaction, on [0, 3]
OperatorMatrices toy(Index cells) {
  auto grid = std::make_shared<const PsiGrid>(PsiGrid::uniform(3.0, cells));
  Vector face(cells), mass(cells + 1), reaction = Vector::Zero(cells + 1);
  for (Index k = 0; k < cells; ++k) face[k] = std::exp(std::pow(0.5 * ((*grid)[k] + (*grid)[k + 1]), 2) / 4.0);
  const Vector w = trapezoid_weights(*grid);
  for (Index j = 0; j <= cells; ++j) mass[j] = std::exp((*grid)[j] * (*grid)[j] / 4.0) * w[j];
  return assemble_from_coefficients(grid, face, mass, reaction);
}

}  // namespace

TEST_CASE("assembly: nonnegative reaction, symmetry, flux conservation") {
  const SelfSimilarProfile& ss = profile_at(256);
  const OperatorMatrices m = assemble(ss);
  CHECK(m.node_reaction.minCoeff() >= 0.0);
  // symmetric tridiagonal: lower and upper coincide
  CHECK((m.stiffness.lower.tail(m.interior() - 1) - m.stiffness.upper.head(m.interior() - 1)).cwiseAbs().maxCoeff() ==
        0.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  Vector v(m.interior()), w(m.interior());
  for (Index i = 0; i < v.size(); ++i) {
    v[i] = n(rng);
    w[i] = n(rng);
  }
  const double a = v.dot(m.stiffness.apply(w)), b = w.dot(m.stiffness.apply(v));
  CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  // constant vector: only reaction and the two boundary fluxes survive
  const Vector ones = Vector::Ones(m.interior());
  const Vector k1 = m.stiffness.apply(ones);
  const Vector& h = m.grid->spacing();
  for (Index i = 1; i + 1 < m.interior(); ++i) {
    // relative to the flux terms that cancel
    const double scale = m.face_rho[i] / h[i] + m.face_rho[i + 1] / h[i + 1];
    CHECK(std::abs(k1[i] - m.node_reaction[i + 1] * m.mass[i]) <= 1e-13 * scale);
  }
  CHECK(k1[0] == doctest::Approx(m.face_rho[0] / h[0] + m.node_reaction[1] * m.mass[0]));
}

TEST_CASE("toy operator: principal eigenvalue against the dense brute-force oracle") {
  std::vector<double> x;
  for (int i = 0; i <= 1000; ++i) x.push_back(3.0 * i / 1000.0);
  const auto rho = [](double s) { return std::exp(s * s / 4.0); };
  const Eigen::VectorXd dense = oracle::dense_sturm_liouville(x, rho, [](double) { return 0.0; }, rho, 2);
  const EigenResult fine = principal_eigen(toy(1000));
  CHECK(std::abs(fine.lambda1 - dense[0]) < 1e-6);
  // the coarse problem converges to it at second order
  const double c1 = principal_eigen(toy(100)).lambda1, c2 = principal_eigen(toy(200)).lambda1;
  CHECK(std::abs(c1 - dense[0]) / std::abs(c2 - dense[0]) > 3.0);
}

TEST_CASE("principal eigenvalue of the Blasius operator is 1") {
  const SelfSimilarProfile& ss = profile_at(1024);
  const OperatorMatrices m = assemble(ss);
  const EigenResult r = principal_eigen(m, 1e-10);
  CHECK(std::abs(r.lambda1 - 1.0) < 5e-3);
  CHECK(r.residual < 1e-9);
  CHECK(r.eigvec.minCoeff() >= 0.0);
  CHECK(quadrature_norm(r.eigvec, ss.a_mass) == doctest::Approx(1.0));
  Vector cand = eigenfunction_candidate(ss);
  cand[cand.size() - 1] = 0.0;
  cand /= quadrature_norm(cand, ss.a_mass);
  CHECK(quadrature_norm(r.eigvec - cand, ss.a_mass) < 1e-2);
}

TEST_CASE("refinement history decays like J^-2") {
  const EigenResult r = eigen_refinement(blasius10(), spectral_psi(), 128, 3);
  REQUIRE(r.refine_history.size() == 4);
  for (std::size_t k = 1; k < r.refine_history.size(); ++k) {
    const double ratio = std::abs(r.refine_history[k - 1].second - 1.0) / std::abs(r.refine_history[k].second - 1.0);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("dense oracle for the first two eigenvalues; deflation gives lambda2") {
  const SelfSimilarProfile& ss = profile_at(256);
  const OperatorMatrices m = assemble(ss);
  const Index n = m.interior();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = m.stiffness.diag[i];
    if (i > 0) K(i, i - 1) = m.stiffness.lower[i];
    if (i + 1 < n) K(i, i + 1) = m.stiffness.upper[i];
    M(i, i) = m.mass[i];
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  const EigenResult r1 = principal_eigen(m);
  CHECK(r1.lambda1 == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-9));
  const EigenResult r2 = deflated_eigen(m, {r1.eigvec});
  CHECK(r2.lambda1 == doctest::Approx(es.eigenvalues()[1]).epsilon(1e-8));
  CHECK(coercivity_gap(m, r2.eigvec) == doctest::Approx(r2.lambda1 - 1.0).epsilon(1e-8));
  CHECK(r2.lambda1 - 1.0 > 0.0);
}

TEST_CASE("rayleigh: candidate, hat function, nonnegative battery, zero vector") {
  const SelfSimilarProfile& ss = profile_at(1024);
  const OperatorMatrices m = assemble(ss);
  const EigenResult r = principal_eigen(m);
  Vector cand = eigenfunction_candidate(ss);
  cand[cand.size() - 1] = 0.0;
  CHECK(std::abs(rayleigh(m, cand) - 1.0) < 5e-3);
  CHECK(std::abs(coercivity_gap(m, cand)) < 5e-3);
  Vector hat = Vector::Zero(ss.grid->size());
  const Index mid = ss.grid->cells() / 2;
  hat[mid] = 1.0;
  CHECK(rayleigh(m, hat) >= r.lambda1 - 1e-10);
  double best = 1e300;
  for (const Vector& v : admissible_battery(ss, 20, 3, true)) {
    CHECK(v.minCoeff() >= 0.0);
    const double f = rayleigh(m, v);
    CHECK(f >= r.lambda1 - 1e-10);
    best = std::min(best, f);
  }
  MESSAGE("battery inf F = " << best << ", lambda1 = " << r.lambda1);
  CHECK_THROWS_AS(rayleigh(m, Vector::Zero(ss.grid->size())), Error);
}

TEST_CASE("coercivity over the 50-vector battery") {
  const SelfSimilarProfile& ss = profile_at(1024);
  const OperatorMatrices m = assemble(ss);
  for (const Vector& v : admissible_battery(ss, 50, 1)) CHECK(coercivity_gap(m, v) >= -1e-6);
}

TEST_CASE("hardy: scale invariance, fine-grid quadrature, refinement stability") {
  const SelfSimilarProfile& s1 = profile_at(1024);
  auto fn = [](const PsiGrid& g) {
    Vector v = Vector::Zero(g.size());
    for (Index j = 0; j < g.size() - 5; ++j) v[j] = g[j] * std::exp(-g[j] * g[j]);
    return v;
  };
  const Vector v = fn(*s1.grid);
  const HardyCheck h = check_hardy(s1, v);
  CHECK(std::isfinite(h.ratio));
  CHECK(h.ratio > 0.0);
  CHECK(check_hardy(s1, 7.0 * v).ratio == doctest::Approx(h.ratio).epsilon(1e-12));
  // the same quadrature at ten times the resolution
  auto fine_grid = std::make_shared<const PsiGrid>(PsiGrid::clustered(spectral_psi(), 10240));
  const SelfSimilarProfile s10 = build_self_similar(blasius10(), fine_grid);
  const HardyCheck h10 = check_hardy(s10, fn(*fine_grid));
  CHECK(std::abs(h.ratio / h10.ratio - 1.0) < 1e-4);

  const SelfSimilarProfile& s0 = profile_at(512);
  const auto b0 = hardy_battery(*s0.grid, 20, 11), b1 = hardy_battery(*s1.grid, 20, 11);
  double sup0 = 0.0, sup1 = 0.0;
  for (std::size_t k = 0; k < b0.size(); ++k) {
    sup0 = std::max(sup0, check_hardy(s0, b0[k]).ratio);
    sup1 = std::max(sup1, check_hardy(s1, b1[k]).ratio);
  }
  CHECK(std::isfinite(sup1));
  CHECK(std::abs(sup1 / sup0 - 1.0) < 0.05);
  Vector bad = v;
  bad[bad.size() - 1] = 1.0;
  CHECK_THROWS_AS(check_hardy(s1, bad), Error);
}

TEST_CASE("truncation for the eigenproblem") {
  const BlasiusProfile& b = *blasius10();
  const double psi_tail = psi_for_tail(b, 1e-3);
  const double psi = spectral_psi_max(b, 1e-3, 1e-10);
  CHECK(psi >= psi_tail);
  CHECK(tail_weight_ratio(b, psi) <= 1e-10 * (1 + 1e-6));
  CHECK(tail_weight_ratio(b, psi_tail) > 1e-10);
}
