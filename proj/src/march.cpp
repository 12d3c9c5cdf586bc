#include "prandtl/march.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "prandtl/tridiagonal.hpp"

namespace prandtl {

GuardViolationError::GuardViolationError(const std::string& message, Trajectory partial, GuardRecord record)
    : Error(ErrorCode::GuardViolation, message), partial_(std::move(partial)), record_(record) {}

namespace {

// Interior rows of L(c) w = c d2(w) + psi d1(w) / 2. The advection stencil is
// central unless that makes the lower coupling negative, in which case the
// row switches to the forward (upwind) difference.
Tridiagonal<double> operator_rows(const Vector& c, const PsiGrid& grid) {
  const Index n = grid.size();
  const Vector& h = grid.spacing();
  Tridiagonal<double> L(n);
  for (Index j = 1; j + 1 < n; ++j) {
    const double hm = h[j - 1], hp = h[j];
    const double a = 2.0 / (hm * (hm + hp));
    const double e = 2.0 / (hp * (hm + hp));
    const double half_psi = 0.5 * grid[j];
    double lo = c[j] * a - half_psi * hp / (hm * (hm + hp));
    double up = c[j] * e + half_psi * hm / (hp * (hm + hp));
    if (lo < 0.0) {
      lo = c[j] * a;
      up = c[j] * e + half_psi / hp;
    }
    L.lower[j] = lo;
    L.upper[j] = up;
    L.diag[j] = -(lo + up);  // rows annihilate constants
  }
  return L;
}

Vector root(const Vector& w) { return w.cwiseMax(0.0).cwiseSqrt(); }

// Source of the perturbation form; zero at the boundary nodes.
Vector balance_source(const Vector& c, const SelfSimilarProfile& ref) {
  Vector s = (c - ref.wbar.cwiseSqrt()).cwiseProduct(ref.wbar_pp);
  s[0] = 0.0;
  s[s.size() - 1] = 0.0;
  return s;
}

void check_reference(const PsiGrid& grid, const SelfSimilarProfile* ref) {
  if (ref == nullptr) return;
  require(ref->wbar.size() == grid.size() && std::abs(ref->psi_max - grid.psi_max()) <= 1e-12 * grid.psi_max(),
          ErrorCode::RangeMismatch, "reference profile is tabulated on a different grid");
}

}  // namespace

Vector omega_rate(const Vector& omega, const PsiGrid& grid, const SelfSimilarProfile* reference) {
  check_reference(grid, reference);
  const Vector c = root(omega);
  Vector r;
  if (reference == nullptr) {
    r = operator_rows(c, grid).apply(omega);
  } else {
    r = operator_rows(c, grid).apply(omega - reference->wbar) + balance_source(c, *reference);
  }
  r[0] = 0.0;
  r[r.size() - 1] = 0.0;
  return r;
}

OmegaField step(const OmegaField& field, double dxi, Scheme scheme, int picard_max, double picard_tol,
                const SelfSimilarProfile* reference) {
  require(dxi >= 0.0, ErrorCode::InvalidArgument, "dxi must be nonnegative");
  require(field.grid != nullptr, ErrorCode::InvalidArgument, "field has no grid");
  if (dxi == 0.0) return field;
  const PsiGrid& grid = *field.grid;
  const Index n = grid.size();
  require(field.values.size() == n, ErrorCode::InvalidArgument, "field size does not match its grid");
  check_reference(grid, reference);

  // unknown u = omega - base; base = 0 for the full form
  const Vector base = reference != nullptr ? reference->wbar : Vector::Zero(n);
  const Vector u0 = field.values - base;
  auto source = [&](const Vector& c) {
    return reference != nullptr ? balance_source(c, *reference) : Vector::Zero(n).eval();
  };

  const double theta = scheme == Scheme::CrankNicolson ? 0.5 : 1.0;
  const Vector c0 = root(field.values);
  Vector rhs = u0;
  if (scheme == Scheme::CrankNicolson) rhs += (1.0 - theta) * dxi * (operator_rows(c0, grid).apply(u0) + source(c0));

  auto solve_with = [&](const Vector& c) {
    Tridiagonal<double> L = operator_rows(c, grid);
    Tridiagonal<double> M(n);
    M.lower = -theta * dxi * L.lower;
    M.upper = -theta * dxi * L.upper;
    M.diag = Vector::Ones(n) - theta * dxi * L.diag;
    M.lower[0] = M.upper[0] = 0.0;
    M.diag[0] = 1.0;
    M.lower[n - 1] = M.upper[n - 1] = 0.0;
    M.diag[n - 1] = 1.0;
    if (!M.diagonally_dominant()) fail(ErrorCode::SolveFailed, "implicit rows lost diagonal dominance");
    Vector b = rhs + theta * dxi * source(c);
    b[0] = -base[0];
    b[n - 1] = 1.0 - base[n - 1];
    return thomas_solve(M, b);
  };
  auto residual = [&](const Vector& u) {
    const Vector c = root(u + base);
    Vector r = u - rhs - theta * dxi * (operator_rows(c, grid).apply(u) + source(c));
    r[0] = 0.0;
    r[n - 1] = 0.0;
    return r.lpNorm<Eigen::Infinity>();
  };

  Vector u = solve_with(c0);
  for (int it = 0; it < picard_max && residual(u) > picard_tol; ++it) u = solve_with(root(u + base));
  if (!u.allFinite()) fail(ErrorCode::SolveFailed, "non-finite values after step");

  OmegaField out = field;
  out.values = u + base;
  out.values[0] = 0.0;
  out.values[n - 1] = 1.0;
  out.xi = field.xi + dxi;
  return out;
}

ComparisonCheck check_comparison(const OmegaField& field, const SelfSimilarProfile& ss,
                                 std::optional<ComparisonCheck> reference, double slack) {
  const Index n = field.values.size();
  require(ss.wbar.size() == n, ErrorCode::RangeMismatch, "field and self-similar profile use different grids");
  const PsiGrid& grid = *field.grid;
  const Vector slope = d1(field.values, grid);
  const Vector slope_bar = d1(ss.wbar, grid);
  ComparisonCheck c;
  c.k1 = c.k2 = slope[0] / slope_bar[0];
  for (Index j = 1; j + 1 < n; ++j) {
    const double r = field.values[j] / ss.wbar[j];
    c.k1 = std::min(c.k1, r);
    c.k2 = std::max(c.k2, r);
  }
  if (reference) {
    c.pass = c.k1 >= reference->k1 - slack && c.k2 <= reference->k2 + slack;
  }
  return c;
}

ConcavityCheck check_concavity(const OmegaField& field, double rel_tol) {
  const Vector second = d2(field.values, *field.grid);
  const Vector r = root(field.values);
  ConcavityCheck c;
  c.max_p = -std::numeric_limits<double>::infinity();
  for (Index j = 1; j + 1 < field.values.size(); ++j) {
    const double p = r[j] * second[j];
    c.max_p = std::max(c.max_p, p);
    c.scale = std::max(c.scale, std::abs(p));
  }
  c.pass = c.max_p <= rel_tol * c.scale;
  return c;
}

namespace {

GuardRecord run_guards(const OmegaField& w, const MarchConfig& cfg, const SelfSimilarProfile& ss,
                       const ComparisonCheck& envelope) {
  GuardRecord g;
  g.xi = w.xi;
  if (cfg.guards.comparison) {
    const ComparisonCheck c = check_comparison(w, ss, envelope, cfg.envelope_slack);
    g.k1 = c.k1;
    g.k2 = c.k2;
    g.envelope_ok = c.pass && w.values.minCoeff() >= -cfg.envelope_slack;
  }
  g.wall_slope = d1(w.values, *w.grid)[0];
  if (cfg.guards.wall_slope) g.wall_ok = g.wall_slope > 0.0;
  if (cfg.guards.concavity) {
    const ConcavityCheck c = check_concavity(w, cfg.concavity_rel_tol);
    g.max_p = c.max_p;
    g.concavity_ok = c.pass;
  }
  return g;
}

std::string describe(const GuardRecord& g) {
  std::string what;
  if (!g.envelope_ok) what += " envelope";
  if (!g.wall_ok) what += " wall_slope";
  if (!g.concavity_ok) what += " concavity";
  char buf[96];
  std::snprintf(buf, sizeof buf, " at xi = %.6g", g.xi);
  return "guard failed:" + what + buf;
}

}  // namespace

Trajectory march(const OmegaField& initial, const MarchConfig& cfg, const std::vector<double>& output_xis,
                 const SelfSimilarProfile* ss) {
  require(cfg.dxi > 0.0, ErrorCode::InvalidArgument, "dxi must be positive");
  require(cfg.dxi <= cfg.dxi_max, ErrorCode::StepTooLarge, "dxi exceeds dxi_max");
  require(cfg.xi_end > initial.xi, ErrorCode::InvalidArgument, "xi_end must exceed the initial xi");
  std::vector<double> stations = output_xis.empty() ? std::vector<double>{cfg.xi_end} : output_xis;
  for (std::size_t k = 0; k < stations.size(); ++k) {
    require(stations[k] > initial.xi && stations[k] <= cfg.xi_end * (1.0 + 1e-14),
            ErrorCode::InvalidArgument, "output stations must lie in (xi0, xi_end]");
    require(k == 0 || stations[k] > stations[k - 1], ErrorCode::InvalidArgument, "output stations must increase");
  }

  const bool guarded = ss != nullptr && (cfg.guards.comparison || cfg.guards.wall_slope || cfg.guards.concavity);
  Trajectory traj;
  ComparisonCheck envelope;
  if (ss != nullptr) {
    envelope = check_comparison(initial, *ss);
    traj.k1_initial = envelope.k1;
    traj.k2_initial = envelope.k2;
    // the far-field value omega = 1 = wbar(inf) always belongs to the envelope
    envelope.k1 = std::min(envelope.k1, 1.0);
    envelope.k2 = std::max(envelope.k2, 1.0);
  }
  const SelfSimilarProfile* balance = cfg.form == Form::Perturbation ? ss : nullptr;
  auto guard = [&](const OmegaField& w) {
    if (!guarded) return;
    const GuardRecord g = run_guards(w, cfg, *ss, envelope);
    traj.guard_log.push_back(g);
    if (!g.ok() && cfg.guards.fatal) throw GuardViolationError(describe(g), traj, g);
  };

  OmegaField w = initial;
  guard(w);
  for (double target : stations) {
    while (w.xi < target) {
      double h = std::min(cfg.dxi, target - w.xi);
      if (target - (w.xi + h) < 1e-9 * cfg.dxi) h = target - w.xi;
      if (cfg.scheme == Scheme::CrankNicolson && traj.steps < cfg.startup_steps) {
        const double xi_next = w.xi + h;
        w = step(w, 0.5 * h, Scheme::BackwardEuler, cfg.picard_max, cfg.picard_tol, balance);
        w = step(w, 0.5 * h, Scheme::BackwardEuler, cfg.picard_max, cfg.picard_tol, balance);
        w.xi = xi_next;
      } else {
        w = step(w, h, cfg.scheme, cfg.picard_max, cfg.picard_tol, balance);
      }
      ++traj.steps;
      if (target - w.xi < 1e-9 * cfg.dxi) w.xi = target;
      guard(w);
    }
    traj.snapshots.push_back(w);
  }
  return traj;
}

}  // namespace prandtl
