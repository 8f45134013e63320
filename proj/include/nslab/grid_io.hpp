#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nslab/grid.hpp"

namespace nslab {

// Raw dump: 32-byte header (magic "NSGF", u32 n, u32 N, u32 components, f64 L, u32 flags, u32 reserved)
// followed by little-endian float64 values, component-major then row-major.
inline constexpr std::size_t kRawHeaderBytes = 32;

struct RawDump {
  GridSpec grid;
  std::vector<ScalarGridField> components;
};

void write_raw_dump(const std::filesystem::path& path, const GridSpec& grid,
                    const std::vector<ScalarGridField>& components);
RawDump read_raw_dump(const std::filesystem::path& path);

// One row per grid point: coordinates then one column per component (n <= 2 only).
void write_grid_csv(const std::filesystem::path& path, const std::vector<ScalarGridField>& components,
                    const std::vector<std::string>& names);

}  // namespace nslab
