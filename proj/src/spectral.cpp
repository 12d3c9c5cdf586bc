#include "prandtl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

namespace prandtl {
namespace {

Vector interior_of(const Vector& full) { return full.segment(1, full.size() - 2); }

Vector full_of(const Vector& interior) {
  Vector v = Vector::Zero(interior.size() + 2);
  v.segment(1, interior.size()) = interior;
  return v;
}

// ||x||_{M^-1} for diagonal M
double inv_mass_norm(const Vector& x, const Vector& mass) { return std::sqrt(x.cwiseAbs2().cwiseQuotient(mass).sum()); }

struct TailTable {
  Vector z;
  Vector tail;  // int_z^inf of the weighted eigenfunction density
  double total = 0.0;
};

// 4 sqrt(2) rho f^2 f''^2 is A (psi wbar_p)^2 dpsi/dz
TailTable tail_table(const BlasiusProfile& b) {
  const double h = b.step;
  const double z_end = b.z_max + 10.0;
  const Index n = static_cast<Index>(std::ceil(z_end / h));
  TailTable t;
  t.z.resize(n + 1);
  Vector g(n + 1);
  for (Index i = 0; i <= n; ++i) {
    const double z = h * static_cast<double>(i);
    const BlasiusState s = b.at(z);
    t.z[i] = z;
    g[i] = 4.0 * std::sqrt(2.0) * std::exp(s.log_rho) * s.f * s.f * s.fpp * s.fpp;
  }
  t.tail = Vector::Zero(n + 1);
  for (Index i = n; i-- > 0;) t.tail[i] = t.tail[i + 1] + 0.5 * h * (g[i] + g[i + 1]);
  t.total = t.tail[0];
  return t;
}

double tail_at(const TailTable& t, double z) {
  const Index n = t.z.size() - 1;
  if (z >= t.z[n]) return 0.0;
  const double h = t.z[1] - t.z[0];
  const Index k = std::min<Index>(static_cast<Index>(z / h), n - 1);
  const double w = (z - t.z[k]) / h;
  // the tail decays like a Gaussian, interpolate its logarithm when possible
  if (t.tail[k + 1] > 0.0) return std::exp((1.0 - w) * std::log(t.tail[k]) + w * std::log(t.tail[k + 1]));
  return (1.0 - w) * t.tail[k];
}

}  // namespace

OperatorMatrices assemble_from_coefficients(GridPtr grid, const Vector& face_rho, const Vector& node_mass,
                                            const Vector& node_reaction) {
  require(grid != nullptr, ErrorCode::InvalidArgument, "missing grid");
  const Index J = grid->cells();
  require(face_rho.size() == J && node_mass.size() == J + 1 && node_reaction.size() == J + 1,
          ErrorCode::InvalidArgument, "coefficient sizes do not match the grid");
  const Vector& h = grid->spacing();
  OperatorMatrices m;
  m.grid = grid;
  m.face_rho = face_rho;
  m.node_mass = node_mass;
  m.node_reaction = node_reaction;
  m.stiffness = Tridiagonal<double>(J - 1);
  m.mass = interior_of(node_mass);
  for (Index j = 1; j < J; ++j) {
    const Index i = j - 1;
    const double left = face_rho[j - 1] / h[j - 1];
    const double right = face_rho[j] / h[j];
    m.stiffness.diag[i] = left + right + node_reaction[j] * node_mass[j];
    if (i > 0) m.stiffness.lower[i] = -left;
    if (j + 1 < J) m.stiffness.upper[i] = -right;
  }
  auto finite = [](const Vector& v) { return v.allFinite(); };
  if (!finite(m.stiffness.diag) || !finite(m.stiffness.lower) || !finite(m.stiffness.upper) || !finite(m.mass)) {
    fail(ErrorCode::BadProfile, "non-finite operator coefficient");
  }
  require((m.mass.array() > 0.0).all(), ErrorCode::BadProfile, "mass entries must be positive");
  return m;
}

OperatorMatrices assemble(const SelfSimilarProfile& p) {
  require(p.blasius != nullptr && p.grid != nullptr, ErrorCode::BadProfile, "incomplete self-similar profile");
  const PsiGrid& g = *p.grid;
  const Index J = g.cells();
  Vector face_rho(J);
  for (Index k = 0; k < J; ++k) face_rho[k] = evaluate_self_similar(*p.blasius, 0.5 * (g[k] + g[k + 1])).rho;
  // reaction uses the identity form psi wbar_p / (4 wbar), finite at the wall
  return assemble_from_coefficients(p.grid, face_rho, p.a_mass, p.reaction);
}

double rayleigh(const OperatorMatrices& m, const Vector& v) {
  const PsiGrid& g = *m.grid;
  require(v.size() == g.size(), ErrorCode::InvalidArgument, "vector size does not match the grid");
  require(v[0] == 0.0, ErrorCode::InvalidArgument, "test vector must vanish at psi = 0");
  const Vector& h = g.spacing();
  double num = 0.0, den = 0.0;
  for (Index k = 0; k < g.cells(); ++k) {
    const double dv = v[k + 1] - v[k];
    num += m.face_rho[k] * dv * dv / h[k];
  }
  for (Index j = 1; j < g.size(); ++j) {
    const double mv2 = m.node_mass[j] * v[j] * v[j];
    num += m.node_reaction[j] * mv2;
    den += mv2;
  }
  require(den > 0.0, ErrorCode::ZeroVector, "Rayleigh quotient of the zero vector");
  return num / den;
}

double coercivity_gap(const OperatorMatrices& m, const Vector& v) { return rayleigh(m, v) - 1.0; }

Vector apply_operator(const OperatorMatrices& m, const Vector& v) {
  require(v.size() == m.interior() + 2, ErrorCode::InvalidArgument, "vector size does not match the grid");
  const Index J = m.grid->cells();
  const Vector& h = m.grid->spacing();
  Vector out = Vector::Zero(J + 1);
  for (Index j = 1; j < J; ++j) {
    const double flux = m.face_rho[j] * (v[j + 1] - v[j]) / h[j] - m.face_rho[j - 1] * (v[j] - v[j - 1]) / h[j - 1];
    out[j] = (-flux + m.node_reaction[j] * m.node_mass[j] * v[j]) / m.node_mass[j];
  }
  return out;
}

namespace {

EigenResult inverse_iteration(const OperatorMatrices& m, const std::vector<Vector>& lower, double tol, double shift,
                              int max_iters) {
  require(tol >= 1e-12, ErrorCode::InvalidArgument, "tol must be at least 1e-12");
  const Index n = m.interior();
  std::vector<Vector> basis;
  for (const Vector& q : lower) {
    require(q.size() == n + 2, ErrorCode::InvalidArgument, "deflation vector size does not match the grid");
    Vector qi = interior_of(q);
    for (const Vector& b : basis) qi -= b.dot(m.mass.cwiseProduct(qi)) * b;
    basis.push_back(qi / std::sqrt(qi.dot(m.mass.cwiseProduct(qi))));
  }
  auto project = [&](Vector& x) {
    for (const Vector& b : basis) x -= b.dot(m.mass.cwiseProduct(x)) * b;
  };

  Tridiagonal<double> shifted = m.stiffness;
  shifted.diag -= shift * m.mass;

  // smooth positive start: the discrete sine-like hump
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = std::sin(M_PI * (i + 1.0) / (n + 1.0)) + 0.1 * std::sin(2.0 * M_PI * (i + 1.0) / (n + 1.0));
  project(x);
  x /= std::sqrt(x.dot(m.mass.cwiseProduct(x)));

  EigenResult r;
  double rq_prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iters; ++it) {
    Vector y = thomas_solve(shifted, m.mass.cwiseProduct(x));
    project(y);
    const double norm = std::sqrt(y.dot(m.mass.cwiseProduct(y)));
    require(norm > 0.0 && std::isfinite(norm), ErrorCode::NoConvergence, "inverse iteration collapsed");
    x = y / norm;
    const Vector kx = m.stiffness.apply(x);
    const double rq = x.dot(kx);  // x has unit M-norm
    const Vector mx = m.mass.cwiseProduct(x);
    const double res = inv_mass_norm(kx - rq * mx, m.mass) / inv_mass_norm(mx, m.mass);
    r.iters = it;
    r.rq = rq;
    r.residual = res;
    if (std::abs(rq - rq_prev) < tol && res < 10.0 * tol) break;
    rq_prev = rq;
    if (it == max_iters) fail(ErrorCode::NoConvergence, "inverse iteration hit max_iters");
  }
  if (x.sum() < 0.0) x = -x;
  r.lambda1 = r.rq;
  r.eigvec = full_of(x);
  r.psi_max = m.grid->psi_max();
  r.grid = m.grid;
  return r;
}

}  // namespace

EigenResult principal_eigen(const OperatorMatrices& m, double tol, double shift, int max_iters) {
  return inverse_iteration(m, {}, tol, shift, max_iters);
}

EigenResult deflated_eigen(const OperatorMatrices& m, const std::vector<Vector>& lower, double tol, double shift,
                           int max_iters) {
  return inverse_iteration(m, lower, tol, shift, max_iters);
}

Vector eigenfunction_candidate(const SelfSimilarProfile& p) { return p.grid->nodes().cwiseProduct(p.wbar_p); }

std::vector<Vector> admissible_battery(const SelfSimilarProfile& p, int count, std::uint64_t seed, bool nonnegative) {
  require(count >= 0, ErrorCode::InvalidArgument, "count must be nonnegative");
  const PsiGrid& g = *p.grid;
  const Index n = g.size();
  const double L = g.psi_max();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector base = eigenfunction_candidate(p);

  auto smooth_noise = [&](int passes) {
    Vector v(n);
    for (Index j = 0; j < n; ++j) v[j] = unit(rng);
    for (int k = 0; k < passes; ++k) {
      Vector s = v;
      for (Index j = 1; j + 1 < n; ++j) s[j] = 0.25 * v[j - 1] + 0.5 * v[j] + 0.25 * v[j + 1];
      v = s;
    }
    return v;
  };
  auto sines = [&](bool positive) {
    Vector v = Vector::Zero(n);
    for (int k = 1; k <= 6; ++k) {
      const double c = positive ? unit(rng) / k : (2.0 * unit(rng) - 1.0) / k;
      for (Index j = 0; j < n; ++j) v[j] += c * std::sin(k * M_PI * g[j] / L);
    }
    return positive ? v.cwiseAbs().eval() : v;
  };

  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) {
    Vector v;
    switch (i % 3) {
      case 0: v = smooth_noise(1 + static_cast<int>(unit(rng) * 200.0)); break;
      case 1: v = base.cwiseProduct((Vector::Ones(n) + 0.5 * (smooth_noise(400).array() - 0.5).matrix())); break;
      default: v = sines(nonnegative); break;
    }
    v[0] = 0.0;
    v[n - 1] = 0.0;
    out.push_back(v);
  }
  return out;
}

HardyCheck check_hardy(const SelfSimilarProfile& p, const Vector& v) {
  const PsiGrid& g = *p.grid;
  const Index n = g.size();
  require(v.size() == n, ErrorCode::InvalidArgument, "vector size does not match the grid");
  require(v[0] == 0.0, ErrorCode::InvalidArgument, "test function must vanish at psi = 0");
  require(n > 6 && v.tail(5).cwiseAbs().maxCoeff() == 0.0, ErrorCode::InvalidArgument,
          "test function must vanish on the last five nodes");
  const Vector& h = g.spacing();
  const Vector w = trapezoid_weights(g);
  HardyCheck c;
  const double wall = d1(v, g)[0] / d1(p.wbar, g)[0];
  for (Index j = 0; j < n; ++j) {
    const double q = j == 0 ? wall : v[j] / p.wbar[j];
    const double s = 1.0 + g[j];
    c.lhs += w[j] * s * s * p.rho[j] * q * q;
  }
  for (Index k = 0; k + 1 < n; ++k) {
    const double rho_mid = evaluate_self_similar(*p.blasius, 0.5 * (g[k] + g[k + 1])).rho;
    const double dv = (v[k + 1] - v[k]) / h[k];
    c.rhs += rho_mid * dv * dv * h[k];
  }
  require(c.rhs > 0.0, ErrorCode::ZeroVector, "Hardy check of a constant function");
  c.ratio = c.lhs / c.rhs;
  return c;
}

std::vector<Vector> hardy_battery(const PsiGrid& g, int count, std::uint64_t seed, double cut) {
  require(count >= 0 && cut > 0.0 && cut < 1.0, ErrorCode::InvalidArgument, "bad Hardy battery parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double edge = cut * g.psi_max();
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) {
    const double a = 1.0 + unit(rng), b = 0.05 + 0.95 * unit(rng);
    Vector v = Vector::Zero(g.size());
    for (Index j = 1; j < g.size(); ++j) {
      const double t = g[j] / edge;
      if (t >= 1.0) break;
      // C-infinity bump that is 1 near the wall
      const double c = std::exp(1.0 - 1.0 / (1.0 - t * t * t * t));
      v[j] = std::pow(g[j], a) * std::exp(-b * g[j] * g[j]) * c;
    }
    out.push_back(v);
  }
  return out;
}

double tail_weight_ratio(const BlasiusProfile& b, double psi_max) {
  require(psi_max > 0.0, ErrorCode::InvalidArgument, "psi_max must be positive");
  const TailTable t = tail_table(b);
  return tail_at(t, b.z_of_psi(psi_max)) / t.total;
}

double spectral_psi_max(const BlasiusProfile& b, double tail_tol, double mass_tol) {
  require(mass_tol > 0.0 && mass_tol < 1.0, ErrorCode::InvalidArgument, "mass_tol must lie in (0, 1)");
  const double psi_tail = psi_for_tail(b, tail_tol);
  const TailTable t = tail_table(b);
  double lo = 0.0, hi = t.z[t.z.size() - 1];
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tail_at(t, mid) / t.total > mass_tol) lo = mid; else hi = mid;
  }
  return std::max(psi_tail, std::sqrt(2.0) * b.at(hi).f);
}

EigenResult eigen_refinement(BlasiusPtr blasius, double psi_max, Index cells, int levels, double tol, double shift,
                             int max_iters) {
  require(levels >= 0, ErrorCode::InvalidArgument, "levels must be nonnegative");
  std::vector<GridPtr> grids{std::make_shared<const PsiGrid>(PsiGrid::clustered(psi_max, cells))};
  for (int k = 0; k < levels; ++k) grids.push_back(std::make_shared<const PsiGrid>(grids.back()->refined()));

  std::vector<std::future<EigenResult>> jobs;
  for (const GridPtr& g : grids) {
    jobs.push_back(std::async(std::launch::async, [blasius, g, tol, shift, max_iters] {
      return principal_eigen(assemble(build_self_similar(blasius, g)), tol, shift, max_iters);
    }));
  }
  EigenResult finest;
  std::vector<std::pair<Index, double>> history;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    EigenResult r = jobs[k].get();
    history.emplace_back(grids[k]->cells(), r.lambda1);
    if (k + 1 == jobs.size()) finest = std::move(r);
  }
  finest.refine_history = std::move(history);
  return finest;
}

}  // namespace prandtl
