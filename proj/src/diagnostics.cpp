#include "prandtl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prandtl {

PhysicalSlice reconstruct(const OmegaField& field, const SelfSimilarProfile* reference) {
  require(field.grid != nullptr, ErrorCode::InvalidArgument, "field has no grid");
  const PsiGrid& g = *field.grid;
  const Index n = g.size();
  const Vector& w = field.values;
  const Vector& h = g.spacing();
  const Vector w_psi = d1(w, g);
  if (!(w_psi[0] > 0.0)) fail(ErrorCode::DegenerateWall, "omega_psi(0) <= 0, the map to y is not invertible");
  const Vector w_pp = d2(w, g);
  const Vector w_xi = omega_rate(w, g, reference);
  const Vector r = w.cwiseMax(0.0).cwiseSqrt();

  const double e_half = std::exp(0.5 * field.xi);
  Vector q(n);
  for (Index j = 1; j < n; ++j) q[j] = w_xi[j] / w[j];
  q[0] = q[1];

  PhysicalSlice s;
  s.xi = field.xi;
  s.d_shift = field.d_shift;
  s.x = field.x();
  s.psi = g.nodes();
  s.y_grid = Vector::Zero(n);
  Vector I = Vector::Zero(n);
  for (Index k = 0; k + 1 < n; ++k) {
    const double cell = 2.0 * h[k] / (r[k] + r[k + 1]);  // int omega^{-1/2}, omega linear on the cell
    s.y_grid[k + 1] = s.y_grid[k] + e_half * cell;
    I[k + 1] = I[k] + cell * (1.0 - 0.5 * (q[k] + q[k + 1]));
  }
  s.u = r;
  s.u_y = 0.5 / e_half * w_psi;
  s.u_yy = 0.5 / (e_half * e_half) * r.cwiseProduct(w_pp);
  s.u_x = Vector::Zero(n);
  s.v = Vector::Zero(n);
  for (Index j = 1; j < n; ++j) {
    s.u_x[j] = (w_xi[j] / (2.0 * r[j]) - 0.25 * w_psi[j] * I[j]) / (e_half * e_half);
    s.v[j] = 0.5 * (r[j] * I[j] - g[j]) / e_half;
  }
  return s;
}

const char* derivative_name(Derivative d) {
  switch (d) {
    case Derivative::U00: return "00";
    case Derivative::U01: return "01";
    case Derivative::U02: return "02";
    case Derivative::U10: return "10";
  }
  return "??";
}

BlasiusFlow blasius_flow(const BlasiusProfile& b, double x, double y, double shift) {
  const double X = x + shift;
  require(X > 0.0, ErrorCode::InvalidArgument, "x + shift must be positive");
  const double scale = std::sqrt(2.0 * X);
  const double z = y / scale;
  const BlasiusState st = b.at(z);
  BlasiusFlow f;
  f.u = st.fp;
  f.u_y = st.fpp / scale;
  f.u_yy = st.fppp() / (2.0 * X);
  f.u_x = -z * st.fpp / (2.0 * X);
  f.v = (z * st.fp - st.f) / scale;
  return f;
}

NormRow error_norms(const PhysicalSlice& slice, const BlasiusProfile& b, std::optional<double> y_limit) {
  const Index n = slice.y_grid.size();
  require(n >= 2 && slice.u.size() == n && slice.u_y.size() == n && slice.u_yy.size() == n && slice.u_x.size() == n,
          ErrorCode::RangeMismatch, "slice fields have inconsistent sizes");
  const double top = slice.y_grid[n - 1];
  const double limit = y_limit.value_or(top);
  require(limit > 0.0 && limit <= top, ErrorCode::RangeMismatch, "y_limit outside the reconstructed range");
  NormRow row;
  row.x = slice.x;
  for (Index j = 0; j < n && slice.y_grid[j] <= limit; ++j) {
    const BlasiusFlow ref = blasius_flow(b, slice.x, slice.y_grid[j]);
    row.norm[0] = std::max(row.norm[0], std::abs(slice.u[j] - ref.u));
    row.norm[1] = std::max(row.norm[1], std::abs(slice.u_y[j] - ref.u_y));
    row.norm[2] = std::max(row.norm[2], std::abs(slice.u_yy[j] - ref.u_yy));
    row.norm[3] = std::max(row.norm[3], std::abs(slice.u_x[j] - ref.u_x));
  }
  return row;
}

Vector finite_difference_uy(const PhysicalSlice& slice) {
  const Index n = slice.y_grid.size();
  Vector out(n);
  for (Index j = 0; j < n; ++j) {
    const Index a = std::max<Index>(j - 1, 0), c = std::min<Index>(j + 1, n - 1);
    if (j == 0 || j == n - 1) {
      out[j] = (slice.u[c] - slice.u[a]) / (slice.y_grid[c] - slice.y_grid[a]);
      continue;
    }
    const double hm = slice.y_grid[j] - slice.y_grid[a], hp = slice.y_grid[c] - slice.y_grid[j];
    out[j] = (-hp / (hm * (hm + hp))) * slice.u[a] + ((hp - hm) / (hm * hp)) * slice.u[j] +
             (hm / (hp * (hm + hp))) * slice.u[c];
  }
  return out;
}

std::vector<NormRow> sharpness_family(const BlasiusProfile& b, double s, double d,
                                      const std::vector<double>& stations, Index samples) {
  require(s > 0.0 && d > 0.0, ErrorCode::InvalidArgument, "shifts must be positive");
  require(samples >= 2, ErrorCode::InvalidArgument, "need at least two samples");
  std::vector<NormRow> rows;
  for (double x : stations) {
    NormRow row;
    row.x = x;
    if (s != d) {
      const double y_top = 12.0 * std::sqrt(2.0 * (x + std::max(s, d)));
      for (Index k = 0; k <= samples; ++k) {
        const double y = y_top * static_cast<double>(k) / static_cast<double>(samples);
        const BlasiusFlow a = blasius_flow(b, x, y, s);
        const BlasiusFlow c = blasius_flow(b, x, y, d);
        row.norm[0] = std::max(row.norm[0], std::abs(a.u - c.u));
        row.norm[1] = std::max(row.norm[1], std::abs(a.u_y - c.u_y));
        row.norm[2] = std::max(row.norm[2], std::abs(a.u_yy - c.u_yy));
        row.norm[3] = std::max(row.norm[3], std::abs(a.u_x - c.u_x));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

double t_quantile_95(Index dof) {
  static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                     2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                     2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  require(dof >= 1, ErrorCode::InvalidArgument, "need at least one degree of freedom");
  if (dof <= 30) return table[dof - 1];
  return 1.95996 + 2.4 / static_cast<double>(dof);
}

DecayFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  const Index n = static_cast<Index>(t.size());
  require(n >= 3 && y.size() == t.size(), ErrorCode::InvalidArgument, "line fit needs >= 3 points");
  double tm = 0.0, lm = 0.0;
  for (Index i = 0; i < n; ++i) {
    require(y[i] > 0.0, ErrorCode::InvalidArgument, "line fit needs positive values");
    tm += t[i];
    lm += std::log(y[i]);
  }
  tm /= n;
  lm /= n;
  double sxx = 0.0, sxy = 0.0;
  for (Index i = 0; i < n; ++i) {
    sxx += (t[i] - tm) * (t[i] - tm);
    sxy += (t[i] - tm) * (std::log(y[i]) - lm);
  }
  require(sxx > 0.0, ErrorCode::InvalidArgument, "line fit needs distinct abscissae");
  DecayFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = lm - f.slope * tm;
  double ssr = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double e = std::log(y[i]) - (f.intercept + f.slope * t[i]);
    ssr += e * e;
  }
  f.rms_residual = std::sqrt(ssr / n);
  f.half_width = t_quantile_95(n - 2) * std::sqrt(ssr / (n - 2) / sxx);
  return f;
}

DecayFit fit_decay(const std::vector<NormRow>& rows, double x_lo, double x_hi, Derivative which) {
  std::vector<double> t, y;
  for (const NormRow& r : rows) {
    if (r.x < x_lo || r.x > x_hi) continue;
    t.push_back(std::log(r.x + 1.0));
    y.push_back(r[which]);
  }
  if (t.size() < 6) fail(ErrorCode::TooFewStations, "fewer than six stations inside the fit window");
  for (std::size_t i = 1; i < t.size(); ++i) {
    require(t[i] > t[i - 1], ErrorCode::InvalidArgument, "stations must increase");
  }
  for (double v : y) {
    if (!(v > 100.0 * std::numeric_limits<double>::epsilon())) fail(ErrorCode::NoisyFloor, "norm at round-off level");
  }
  const DecayFit f = fit_line(t, y);
  if (f.slope > -0.05) fail(ErrorCode::NoisyFloor, "norms do not decay inside the window");
  // curvature: a floor shows up as a flattening second half
  const std::size_t half = t.size() / 2;
  const DecayFit first = fit_line({t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() - half)},
                                  {y.begin(), y.begin() + static_cast<std::ptrdiff_t>(t.size() - half)});
  const DecayFit second = fit_line({t.begin() + static_cast<std::ptrdiff_t>(half), t.end()},
                                   {y.begin() + static_cast<std::ptrdiff_t>(half), y.end()});
  if (second.slope > 0.5 * first.slope) fail(ErrorCode::NoisyFloor, "decay flattens out inside the window");
  return f;
}

namespace {

// phi with M = 1 at one node
double barrier_shape(BarrierFamily fam, const BarrierParams& p, double B, double xi, double psi, double wbar,
                     double wbar_p) {
  if (fam == BarrierFamily::Phi1) return std::exp(-p.alpha * xi - p.mu * psi * psi) * wbar;
  return std::exp(B - xi - B * std::exp(-p.delta * xi)) * psi * wbar_p;
}

struct EnvelopeScan {
  bool holds = true;
  std::optional<std::size_t> snapshot;
  double psi = 0.0;
  std::vector<double> tightness;
};

EnvelopeScan scan(const std::vector<OmegaField>& snaps, const SelfSimilarProfile& prof, BarrierFamily fam,
                  const BarrierParams& p, double M, double B) {
  EnvelopeScan out;
  const PsiGrid& g = *prof.grid;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    double tight = 0.0;
    for (Index j = 1; j + 1 < g.size() && g[j] <= p.psi_cut; ++j) {
      const double err = std::abs(snaps[k].values[j] - prof.wbar[j]);
      const double phi = M * barrier_shape(fam, p, B, snaps[k].xi, g[j], prof.wbar[j], prof.wbar_p[j]);
      if (phi > 0.0) tight = std::max(tight, err / phi);
      if (err > phi) {
        if (out.holds) {
          out.snapshot = k;
          out.psi = g[j];
        }
        out.holds = false;
      }
    }
    out.tightness.push_back(tight);
  }
  return out;
}

}  // namespace

EnvelopeVerdict barrier_envelope(const std::vector<OmegaField>& snaps, const SelfSimilarProfile& prof,
                                 BarrierFamily fam, BarrierParams p) {
  require(!snaps.empty(), ErrorCode::InvalidArgument, "no snapshots");
  for (const OmegaField& s : snaps) {
    require(s.values.size() == prof.wbar.size(), ErrorCode::RangeMismatch, "snapshot grid differs from the profile");
  }
  const PsiGrid& g = *prof.grid;
  auto fit_M = [&](double B) {
    double m = 0.0;
    for (Index j = 1; j + 1 < g.size() && g[j] <= p.psi_cut; ++j) {
      const double phi = barrier_shape(fam, p, B, snaps[0].xi, g[j], prof.wbar[j], prof.wbar_p[j]);
      m = std::max(m, std::abs(snaps[0].values[j] - prof.wbar[j]) / phi);
    }
    return p.margin * m;
  };
  const bool fit_m = !(p.M > 0.0);
  auto resolve = [&](double B) { return fit_m ? fit_M(B) : p.M; };

  double B = p.B.value_or(0.0);
  if (fam == BarrierFamily::Phi2 && !p.B) {
    double lo = 0.0, hi = 50.0;
    if (!scan(snaps, prof, fam, p, resolve(lo), lo).holds) {
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (scan(snaps, prof, fam, p, resolve(mid), mid).holds) hi = mid; else lo = mid;
      }
      B = hi;
    } else {
      B = 0.0;
    }
  }
  const double M = resolve(B);
  const EnvelopeScan sc = scan(snaps, prof, fam, p, M, B);

  EnvelopeVerdict v;
  v.family = fam;
  v.params = p;
  v.params.M = M;
  v.params.B = B;
  v.holds = sc.holds;
  v.first_violation_snapshot = sc.snapshot;
  v.first_violation_psi = sc.psi;
  v.tightness = sc.tightness;
  for (const OmegaField& s : snaps) v.xi.push_back(s.xi);
  return v;
}

WeightedDecay weighted_decay(const std::vector<OmegaField>& snaps, const SelfSimilarProfile& prof) {
  WeightedDecay out;
  const PsiGrid& g = *prof.grid;
  for (const OmegaField& s : snaps) {
    require(s.values.size() == prof.wbar.size(), ErrorCode::RangeMismatch, "snapshot grid differs from the profile");
    const Vector w = s.values - prof.wbar;
    const Vector w_xi = omega_rate(s.values, g, &prof);
    out.xi.push_back(s.xi);
    out.a_norm.push_back(quadrature_norm(w, prof.a_mass));
    out.rho_psi_norm.push_back(weighted_norm(d1(w, g), prof.rho, g, NormKind::L2));
    out.a_xi_norm.push_back(quadrature_norm(w_xi, prof.a_mass));
    out.rho_xipsi_norm.push_back(weighted_norm(d1(w_xi, g), prof.rho, g, NormKind::L2));
  }
  auto rate = [&](const std::vector<double>& norms) -> std::optional<RateFit> {
    if (norms.size() < 3) return std::nullopt;
    for (double v : norms) {
      if (!(v > 0.0)) return std::nullopt;
    }
    const DecayFit f = fit_line(out.xi, norms);
    return RateFit{f.slope, f.half_width, f.points};
  };
  out.a_rate = rate(out.a_norm);
  out.rho_psi_rate = rate(out.rho_psi_norm);
  out.a_xi_rate = rate(out.a_xi_norm);
  out.rho_xipsi_rate = rate(out.rho_xipsi_norm);
  return out;
}

RoundTrip round_trip(const InitialProfile& profile, double d_shift, GridPtr grid,
                     const std::function<double(double)>& exact) {
  const OmegaField field = ingest_initial(profile, d_shift, grid);
  const PhysicalSlice slice = reconstruct(field);
  auto u0 = [&](double y) { return exact ? exact(y) : profile.u_at(y); };
  RoundTrip rt;
  const Index n = slice.y_grid.size();
  for (Index j = 0; j < n; ++j) rt.error = std::max(rt.error, std::abs(slice.u[j] - u0(slice.y_grid[j])));

  // linear interpolation of u between neighbouring nodes, probed halfway in y
  double grid_err = 0.0;
  for (Index k = 0; k + 1 < n; ++k) {
    const double ya = slice.y_grid[k], yb = slice.y_grid[k + 1];
    grid_err = std::max(grid_err, std::abs(u0(0.5 * (ya + yb)) - 0.5 * (u0(ya) + u0(yb))));
  }
  double sample_err = 0.0;
  if (exact) {
    const Vector& ys = profile.y_samples;
    for (Index k = 0; k + 1 < ys.size(); ++k) {
      const double ym = 0.5 * (ys[k] + ys[k + 1]);
      sample_err = std::max(sample_err, std::abs(exact(ym) - 0.5 * (profile.u_samples[k] + profile.u_samples[k + 1])));
    }
  }
  // two interpolations in series (samples to the psi-grid, grid back to y); their errors add
  rt.interp_error = grid_err + sample_err;
  rt.pass = rt.error <= 2.0 * rt.interp_error;
  return rt;
}

std::vector<double> log_stations(double lo, double hi, int count) {
  require(count >= 1 && lo > -1.0 && hi >= lo, ErrorCode::InvalidArgument, "bad station range");
  std::vector<double> xs;
  const double a = std::log(lo + 1.0), b = std::log(hi + 1.0);
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? b : a + (b - a) * k / (count - 1.0);
    xs.push_back(k == 0 ? lo : (k == count - 1 ? hi : std::exp(t) - 1.0));
  }
  return xs;
}

DecayReport run_decay(BlasiusPtr blasius, const DecayStudy& st) {
  require(blasius != nullptr, ErrorCode::InvalidArgument, "missing Blasius profile");
  if (st.stations.empty()) fail(ErrorCode::TooFewStations, "empty station list");
  auto grid = std::make_shared<const PsiGrid>(PsiGrid::clustered(st.psi_max, st.cells));
  const SelfSimilarProfile prof = build_self_similar(blasius, grid);

  OmegaField init;
  if (st.initial) {
    init = ingest_initial(*st.initial, st.d, grid);
  } else {
    init = shifted_blasius_field(*blasius, grid, st.s, st.d, std::log(st.d));
    init.values[grid->size() - 1] = 1.0;
  }
  std::vector<double> xis;
  for (double x : st.stations) xis.push_back(std::log(x + st.d));

  MarchConfig cfg;
  cfg.d_shift = st.d;
  cfg.dxi = st.dxi;
  cfg.scheme = st.scheme;
  cfg.xi_end = xis.back();
  const Trajectory traj = march(init, cfg, xis, &prof);

  DecayReport rep;
  rep.stations = st.stations;
  rep.fit_lo = st.fit_lo;
  rep.fit_hi = st.fit_hi;
  for (const OmegaField& snap : traj.snapshots) {
    NormRow row = error_norms(reconstruct(snap, &prof), *blasius);
    row.x = snap.x();
    rep.norms.push_back(row);
  }
  if (st.oracle && !st.initial) rep.oracle = sharpness_family(*blasius, st.s, 1.0, st.stations);
  for (Derivative which : kDerivatives) {
    const auto i = static_cast<std::size_t>(which);
    try {
      rep.slopes[i] = fit_decay(rep.norms, st.fit_lo, st.fit_hi, which);
    } catch (const Error& e) {
      rep.slope_errors[i] = e.what();
    }
    if (!rep.oracle.empty()) {
      try {
        rep.oracle_slopes[i] = fit_decay(rep.oracle, st.fit_lo, st.fit_hi, which);
      } catch (const Error&) {
      }
    }
  }
  for (const auto& [fam, params] : st.barriers) rep.barriers.push_back(barrier_envelope(traj.snapshots, prof, fam, params));
  if (st.weighted) rep.weighted = weighted_decay(traj.snapshots, prof);
  return rep;
}

}  // namespace prandtl
