#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "prandtl/blasius.hpp"
#include "prandtl/config.hpp"
#include "prandtl/diagnostics.hpp"
#include "prandtl/spectral.hpp"

namespace prandtl {

using Json = nlohmann::ordered_json;

/// Comma-separated table with a header row, LF endings and %.17g numbers.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<double>& values);
  std::string str() const { return text_; }
  void save(const std::string& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

/// Writes text exactly as given (binary mode, so LF stays LF).
void write_text(const std::string& path, const std::string& text);

CsvWriter blasius_csv(const BlasiusProfile& profile);
CsvWriter self_similar_csv(const SelfSimilarProfile& profile);
CsvWriter omega_csv(const OmegaField& field);
CsvWriter eigenvector_csv(const EigenResult& result, const PsiGrid& grid);
CsvWriter norms_csv(const std::vector<NormRow>& rows);
CsvWriter loglog_csv(const std::vector<NormRow>& rows);

Json to_json(const RunConfig& config);
Json to_json(const GuardRecord& record);
Json to_json(const DecayFit& fit);
Json to_json(const EigenResult& result);
Json to_json(const EnvelopeVerdict& verdict);
Json to_json(const WeightedDecay& decay);
Json to_json(const DecayReport& report);

/// Stable formatting: two-space indent and a trailing newline.
std::string dump(const Json& j);

}  // namespace prandtl
