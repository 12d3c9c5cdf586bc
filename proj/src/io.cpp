#include "prandtl/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "prandtl/errors.hpp"

namespace prandtl {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  require(values.size() == columns_, ErrorCode::InvalidArgument, "CSV row width does not match the header");
  char buf[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    if (i) text_ += ',';
    text_ += buf;
  }
  text_ += '\n';
}

void CsvWriter::save(const std::string& path) const { write_text(path, text_); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

CsvWriter blasius_csv(const BlasiusProfile& p) {
  CsvWriter w({"z", "f", "fp", "fpp"});
  for (Index i = 0; i < p.size(); ++i) w.row({p.z_grid[i], p.f[i], p.fp[i], p.fpp[i]});
  return w;
}

CsvWriter self_similar_csv(const SelfSimilarProfile& p) {
  CsvWriter w({"psi", "wbar", "wbar_p", "wbar_pp", "rho"});
  for (Index j = 0; j < p.grid->size(); ++j) w.row({(*p.grid)[j], p.wbar[j], p.wbar_p[j], p.wbar_pp[j], p.rho[j]});
  return w;
}

CsvWriter omega_csv(const OmegaField& f) {
  CsvWriter w({"psi", "omega"});
  for (Index j = 0; j < f.grid->size(); ++j) w.row({(*f.grid)[j], f.values[j]});
  return w;
}

CsvWriter eigenvector_csv(const EigenResult& r, const PsiGrid& g) {
  CsvWriter w({"psi", "v"});
  for (Index j = 0; j < g.size(); ++j) w.row({g[j], r.eigvec[j]});
  return w;
}

CsvWriter norms_csv(const std::vector<NormRow>& rows) {
  CsvWriter w({"x", "norm_00", "norm_01", "norm_02", "norm_10"});
  for (const NormRow& r : rows) w.row({r.x, r.norm[0], r.norm[1], r.norm[2], r.norm[3]});
  return w;
}

CsvWriter loglog_csv(const std::vector<NormRow>& rows) {
  CsvWriter w({"log_x1", "log_norm_00", "log_norm_01", "log_norm_02", "log_norm_10"});
  for (const NormRow& r : rows) {
    w.row({std::log(r.x + 1.0), std::log(r.norm[0]), std::log(r.norm[1]), std::log(r.norm[2]), std::log(r.norm[3])});
  }
  return w;
}

Json to_json(const RunConfig& c) {
  Json j = Json::object();
  for (const ConfigEntry& e : entries(c)) {
    Json& slot = j[e.section][e.key];
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (e.key == "seed") {
      slot = c.seed;  // keep all 64 bits
    } else if (e.value == "true" || e.value == "false") {
      slot = e.value == "true";
    } else if (!e.value.empty() && end == e.value.c_str() + e.value.size() && e.key != "csv" && e.key != "out") {
      slot = v;
    } else {
      slot = e.value;
    }
  }
  return j;
}

Json to_json(const GuardRecord& g) {
  return Json{{"xi", g.xi}, {"k1", g.k1}, {"k2", g.k2}, {"wall_slope", g.wall_slope}, {"max_p", g.max_p},
              {"ok", g.ok()}};
}

Json to_json(const DecayFit& f) {
  return Json{{"slope", f.slope},
              {"half_width", f.half_width},
              {"intercept", f.intercept},
              {"rms_residual", f.rms_residual},
              {"points", f.points}};
}

Json to_json(const EigenResult& r) {
  Json history = Json::array();
  for (const auto& [J, lambda] : r.refine_history) history.push_back(Json::array({J, lambda}));
  return Json{{"lambda1", r.lambda1}, {"rq", r.rq},           {"iters", r.iters},
              {"residual", r.residual}, {"psi_max", r.psi_max}, {"refine_history", history}};
}

Json to_json(const EnvelopeVerdict& v) {
  Json j{{"family", v.family == BarrierFamily::Phi1 ? "phi1" : "phi2"},
         {"holds", v.holds},
         {"M", v.params.M},
         {"alpha", v.params.alpha},
         {"mu", v.params.mu},
         {"delta", v.params.delta},
         {"B", v.params.B.value_or(0.0)},
         {"psi_cut", v.params.psi_cut}};
  if (v.first_violation_snapshot) {
    j["first_violation"] = Json{{"snapshot", *v.first_violation_snapshot}, {"psi", v.first_violation_psi}};
  } else {
    j["first_violation"] = nullptr;
  }
  j["xi"] = v.xi;
  j["tightness"] = v.tightness;
  return j;
}

Json to_json(const WeightedDecay& w) {
  auto rate = [](const std::optional<RateFit>& r) -> Json {
    if (!r) return nullptr;
    return Json{{"rate", r->rate}, {"half_width", r->half_width}, {"points", r->points}};
  };
  return Json{{"xi", w.xi},
              {"a_norm", w.a_norm},
              {"rho_psi_norm", w.rho_psi_norm},
              {"a_xi_norm", w.a_xi_norm},
              {"rho_xipsi_norm", w.rho_xipsi_norm},
              {"rates",
               {{"a", rate(w.a_rate)},
                {"rho_psi", rate(w.rho_psi_rate)},
                {"a_xi", rate(w.a_xi_rate)},
                {"rho_xipsi", rate(w.rho_xipsi_rate)}}}};
}

namespace {

Json rows_json(const std::vector<NormRow>& rows) {
  Json out = Json::array();
  for (const NormRow& r : rows) {
    out.push_back(Json{{"x", r.x}, {"norm_00", r.norm[0]}, {"norm_01", r.norm[1]}, {"norm_02", r.norm[2]},
                       {"norm_10", r.norm[3]}});
  }
  return out;
}

}  // namespace

Json to_json(const DecayReport& r) {
  Json j{{"schema", 1}, {"stations", r.stations}, {"fit_window", {r.fit_lo, r.fit_hi}}, {"norms", rows_json(r.norms)}};
  Json slopes = Json::object();
  Json oracle_slopes = Json::object();
  for (Derivative d : kDerivatives) {
    const auto i = static_cast<std::size_t>(d);
    const std::string key = std::string("slope_") + derivative_name(d);
    if (r.slopes[i]) {
      slopes[key] = to_json(*r.slopes[i]);
    } else {
      slopes[key] = Json{{"error", r.slope_errors[i].value_or("not fitted")}};
    }
    if (r.oracle_slopes[i]) oracle_slopes[key] = to_json(*r.oracle_slopes[i]);
  }
  j["slopes"] = slopes;
  j["oracle"] = rows_json(r.oracle);
  j["oracle_slopes"] = oracle_slopes;
  Json barriers = Json::array();
  for (const EnvelopeVerdict& v : r.barriers) barriers.push_back(to_json(v));
  j["barriers"] = barriers;
  j["weighted_decay"] = r.weighted ? to_json(*r.weighted) : Json(nullptr);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace prandtl
