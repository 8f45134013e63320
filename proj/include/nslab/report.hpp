#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nslab/config.hpp"
#include "nslab/data.hpp"
#include "nslab/diagnostics.hpp"
#include "nslab/heat_kernel.hpp"
#include "nslab/picard.hpp"

namespace nslab {

// Sections every report carries, either filled or marked skipped with a reason.
inline const std::vector<std::string> kReportSections = {
    "admissibility", "contraction", "sweep",       "residual",      "blowup_fit",
    "curvature",     "constraint",  "signature",   "gap_lengths",   "kernel_table",
};

class RunReport {
 public:
  explicit RunReport(const RunConfig& cfg);

  void set(const std::string& section, nlohmann::json value);
  void skip(const std::string& section, const std::string& reason);
  void timing(const std::string& name, double seconds);
  void check(const std::string& name, bool passed, const std::string& detail = {});
  bool all_passed() const;

  nlohmann::json to_json() const;

 private:
  nlohmann::json config_;
  std::string hash_;
  nlohmann::json sections_ = nlohmann::json::object();
  nlohmann::json timings_ = nlohmann::json::object();
  nlohmann::json checks_ = nlohmann::json::array();
};

nlohmann::json to_json(const AdmissibilityReport& r);
nlohmann::json to_json(const IncrementNorms& n);
nlohmann::json to_json(const ContractionRecord& r);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const BlowupFit& f);
nlohmann::json to_json(const ConstraintSeries& s);
nlohmann::json to_json(const SignatureSeries& s);
nlohmann::json to_json(const UniformL1Table& t);

// Writes report.json into dir.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_contraction_csv(const std::filesystem::path& path, const ContractionRecord& r);
void write_kernel_csv(const std::filesystem::path& path, const UniformL1Table& t);
void write_constraint_csv(const std::filesystem::path& path, const ConstraintSeries& s);
void write_signature_csv(const std::filesystem::path& path, const SignatureSeries& s);
void write_curvature_csv(const std::filesystem::path& path, const CurvatureHistory& c);
void write_sweep_csv(const std::filesystem::path& path, const SweepReport& r);
void write_blowup_csv(const std::filesystem::path& path, const BlowupFit& f);

}  // namespace nslab
