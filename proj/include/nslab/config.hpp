#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nslab/data.hpp"
#include "nslab/diagnostics.hpp"
#include "nslab/grid.hpp"
#include "nslab/picard.hpp"

namespace nslab {

enum class DataKind { flat, singular, gauge_wave };

struct DataConfig {
  DataKind kind = DataKind::singular;
  SingularProfileParams profile;
  double amp = 0.1;
  InitialRateMode h0_mode = InitialRateMode::zero;
  double h0_amp = 0.0;
  std::vector<int> perturbed = {1};
  double min_margin = 0.5;
  GaugeWave gauge_wave;

  bool operator==(const DataConfig&) const = default;
};

struct CurveSpec {
  std::string name;
  std::array<double, 4> from{};
  std::array<double, 4> to{};
  int samples = 201;

  bool operator==(const CurveSpec&) const = default;
};

struct DiagnosticsConfig {
  std::vector<double> radii;  // empty: see blowup_radii
  double shell_ratio = 1.5;
  std::optional<double> r_excl;  // default 4h
  std::string exclusion_shape = "auto";  // auto, ball, slab, none
  int time_order = 4;
  std::vector<CurveSpec> curves;
  std::vector<double> kernel_nus = {1e-1, 1e-2, 1e-3, 1e-4};
  std::optional<double> sobolev_s;  // default n/2 + 1.1

  bool operator==(const DiagnosticsConfig&) const = default;
};

struct RunConfig {
  GridSpec grid;
  SchemeConfig scheme;
  bool auto_T = false;
  int max_halvings = 6;
  DataConfig data;
  std::vector<double> nu_sequence;
  bool enforce_resolution = true;
  DiagnosticsConfig diagnostics;
  std::uint64_t seed = 20240601;

  bool operator==(const RunConfig&) const = default;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);
RunConfig config_from_json(const nlohmann::json& j);
// Canonical form with every default filled in.
nlohmann::json to_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

// Objects derived from the configuration.
DataList build_data(const RunConfig& cfg);
ExclusionRegion exclusion_region(const RunConfig& cfg);
// Configured radii, or a default one-decade window. Empty when the grid cannot resolve a window on the plateau.
std::vector<double> blowup_radii(const RunConfig& cfg);
SingularGeometry singular_geometry(const RunConfig& cfg);
CurveSample build_curve(const CurveSpec& spec, int dim);

}  // namespace nslab
