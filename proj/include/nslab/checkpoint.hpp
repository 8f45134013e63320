#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "nslab/picard.hpp"

namespace nslab {

// Writes the latest iterate (one raw dump per slice holding g, g_{,k}, h) and manifest.json.
void write_checkpoint(const std::filesystem::path& dir, const IterationState& state, const SchemeConfig& cfg,
                      const std::string& config_hash);

struct Checkpoint {
  IterationState state;
  std::string config_hash;
  double nu0 = 0.0;
};

Checkpoint read_checkpoint(const std::filesystem::path& dir, std::shared_ptr<const DataList> data);

}  // namespace nslab
