#include "nslab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "nslab/error.hpp"

namespace nslab {

using nlohmann::json;

namespace {

// JSON has no infinities or NaN; they are reported as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

RunReport::RunReport(const RunConfig& cfg) : config_(nslab::to_json(cfg)), hash_(config_hash(cfg)) {}

void RunReport::set(const std::string& section, json value) { sections_[section] = std::move(value); }

void RunReport::skip(const std::string& section, const std::string& reason) {
  sections_[section] = {{"skipped", true}, {"reason", reason}};
}

void RunReport::timing(const std::string& name, double seconds) { timings_[name] = seconds; }

void RunReport::check(const std::string& name, bool passed, const std::string& detail) {
  checks_.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
}

bool RunReport::all_passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const json& c) { return c.at("passed").get<bool>(); });
}

json RunReport::to_json() const {
  json j;
  j["config_hash"] = hash_;
  j["config"] = config_;
  json sections = sections_;
  for (const auto& name : kReportSections)
    if (!sections.contains(name)) sections[name] = {{"skipped", true}, {"reason", "not requested by this command"}};
  j["sections"] = sections;
  j["timings"] = timings_;
  j["summary"] = {{"checks", checks_}, {"all_passed", all_passed()}};
  return j;
}

json to_json(const AdmissibilityReport& r) {
  return {{"s", r.s},
          {"lorentz_margin", number(r.lorentz.margin)},
          {"one_negative_everywhere", r.lorentz.one_negative_everywhere},
          {"first_failure", r.lorentz.first_failure == kNoLocation ? json(nullptr) : json(r.lorentz.first_failure)},
          {"ratio_inf", number(r.lorentz.ratio_inf)},
          {"ratio_sup", number(r.lorentz.ratio_sup)},
          {"sobolev_g", numbers(r.sobolev_g)},
          {"sobolev_h", numbers(r.sobolev_h)},
          {"product_bound", number(r.product_bound)},
          {"lorentz_ok", r.lorentz_ok},
          {"sobolev_ok", r.sobolev_ok},
          {"product_ok", r.product_ok},
          {"passed", r.passed}};
}

json to_json(const IncrementNorms& n) {
  auto fam = [](const FamilyNorms& f) {
    return json{{"sup", number(f.sup)}, {"lipschitz", number(f.lipschitz)}, {"h2", number(f.h2)}};
  };
  return {{"g", fam(n.g)}, {"dg", fam(n.dg)}, {"h", fam(n.h)}, {"sup", number(n.sup())}, {"combined", number(n.combined())}};
}

json to_json(const ContractionRecord& r) {
  json norms = json::array();
  for (const auto& n : r.norms) norms.push_back(to_json(n));
  return {{"T", r.T},
          {"nu0", r.nu0},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"ratios", numbers(r.ratios)},
          {"norms", norms},
          {"T_attempts", numbers(r.T_attempts)}};
}

json to_json(const SweepReport& r) {
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  json j = {{"nus", numbers(r.nus)}, {"records", records}, {"exclusion_radius", r.exclusion.radius}};
  if (r.distances.empty())
    j["cauchy"] = {{"skipped", true}, {"reason", "fewer than two viscosities"}};
  else
    j["cauchy"] = {{"distances", numbers(r.distances)}};
  return j;
}

json to_json(const ResidualReport& r) {
  json per = json::array();
  for (std::size_t i = 0; i < r.per_slice.size(); ++i)
    per.push_back({{"slice", r.slices[i]},
                   {"g", number(r.per_slice[i][0])},
                   {"dg", number(r.per_slice[i][1])},
                   {"h", number(r.per_slice[i][2])}});
  return {{"sup", {{"g", number(r.sup[0])}, {"dg", number(r.sup[1])}, {"h", number(r.sup[2])}}},
          {"max", number(r.max())},
          {"time_order", r.time_order},
          {"per_slice", per}};
}

json to_json(const BlowupFit& f) {
  return {{"radii", numbers(f.radii)},
          {"maxima", numbers(f.maxima)},
          {"beta", number(f.beta)},
          {"residual", number(f.residual)},
          {"shell_ratio", f.shell_ratio}};
}

json to_json(const ConstraintSeries& s) {
  return {{"times", numbers(s.times)}, {"max", numbers(s.max)}, {"initial", number(s.initial)}, {"peak", number(s.peak)}};
}

json to_json(const SignatureSeries& s) {
  return {{"times", numbers(s.times)},
          {"margin", numbers(s.margin)},
          {"first_failure", s.first_failure < 0 ? json(nullptr) : json(s.first_failure)}};
}

json to_json(const UniformL1Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"nu0", r.nu0},
                    {"l1_kernel", number(r.l1_kernel)},
                    {"l1_derivative", number(r.l1_derivative)},
                    {"lipschitz_sup", number(r.lipschitz_sup)},
                    {"resolved", r.resolved}});
  return {{"T", t.T},
          {"rows", rows},
          {"cap", number(t.cap)},
          {"max_derivative", number(t.max_derivative)},
          {"spread", number(t.spread)},
          {"within_ten_percent", t.within_ten_percent},
          {"below_cap", t.below_cap},
          {"c_vis", t.c_vis},
          {"lipschitz_bound_holds", t.lipschitz_bound_holds}};
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir.string());
  const auto path = dir / "report.json";
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path.string());
  os << report.to_json().dump(2) << "\n";
  if (!os) throw Error(ErrorKind::io, "write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path.string());
  os << std::setprecision(17);
  for (std::size_t i = 0; i < header.size(); ++i) os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) os << row[i] << (i + 1 < row.size() ? "," : "\n");
  if (!os) throw Error(ErrorKind::io, "write failed for " + path.string());
}

void write_contraction_csv(const std::filesystem::path& path, const ContractionRecord& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t l = 0; l < r.norms.size(); ++l) {
    const auto& n = r.norms[l];
    const double ratio = l >= 1 && l - 1 < r.ratios.size() ? r.ratios[l - 1] : std::nan("");
    rows.push_back({static_cast<double>(l + 1), n.g.sup, n.dg.sup, n.h.sup, n.sup(), n.combined(), ratio});
  }
  write_csv(path, {"l", "sup_g", "sup_dg", "sup_h", "sup", "combined", "ratio"}, rows);
}

void write_kernel_csv(const std::filesystem::path& path, const UniformL1Table& t) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : t.rows)
    rows.push_back({r.nu0, r.l1_kernel, r.l1_derivative, r.lipschitz_sup, r.resolved ? 1.0 : 0.0});
  write_csv(path, {"nu0", "l1_kernel", "l1_derivative", "lipschitz_sup", "resolved"}, rows);
}

void write_constraint_csv(const std::filesystem::path& path, const ConstraintSeries& s) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < s.times.size(); ++j)
    rows.push_back({s.times[j], s.sup[j][0], s.sup[j][1], s.sup[j][2], s.sup[j][3], s.max[j]});
  write_csv(path, {"t", "gamma0", "gamma1", "gamma2", "gamma3", "max"}, rows);
}

void write_signature_csv(const std::filesystem::path& path, const SignatureSeries& s) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < s.times.size(); ++j) rows.push_back({s.times[j], s.margin[j]});
  write_csv(path, {"t", "margin"}, rows);
}

void write_curvature_csv(const std::filesystem::path& path, const CurvatureHistory& c) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < c.times.size(); ++j) rows.push_back({c.times[j], c.sup_outside[j], c.scalar[j].sup_norm()});
  write_csv(path, {"t", "sup_outside_exclusion", "sup_all"}, rows);
}

void write_sweep_csv(const std::filesystem::path& path, const SweepReport& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.nus.size(); ++i)
    rows.push_back({r.nus[i], i == 0 ? std::nan("") : r.distances[i - 1], static_cast<double>(r.records[i].iterations)});
  write_csv(path, {"nu0", "distance_to_previous", "iterations"}, rows);
}

void write_blowup_csv(const std::filesystem::path& path, const BlowupFit& f) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < f.radii.size(); ++i) rows.push_back({f.radii[i], f.maxima[i]});
  write_csv(path, {"radius", "max_abs_curvature"}, rows);
}

}  // namespace nslab
