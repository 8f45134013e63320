#include "nslab/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "nslab/error.hpp"

namespace nslab {

static_assert(std::endian::native == std::endian::little, "raw dump I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void write_raw_dump(const std::filesystem::path& path, const GridSpec& grid,
                    const std::vector<ScalarGridField>& components) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  os.write("NSGF", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.n));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.N));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(components.size()));
  put<double>(os, grid.L);
  put<std::uint32_t>(os, grid.offset_origin ? 1u : 0u);
  put<std::uint32_t>(os, 0u);
  for (const auto& c : components) {
    if (!(c.grid() == grid)) throw Error(ErrorKind::shape, "dump component on a different grid");
    os.write(reinterpret_cast<const char*>(c.values().data()),
             static_cast<std::streamsize>(c.size() * sizeof(double)));
  }
  if (!os) throw Error(ErrorKind::io, "write failed for " + path.string());
}

RawDump read_raw_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::io, "cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "NSGF", 4) != 0) throw Error(ErrorKind::io, "bad magic in " + path.string());
  const auto n = get<std::uint32_t>(is);
  const auto N = get<std::uint32_t>(is);
  const auto count = get<std::uint32_t>(is);
  const auto L = get<double>(is);
  const auto flags = get<std::uint32_t>(is);
  (void)get<std::uint32_t>(is);
  if (!is) throw Error(ErrorKind::io, "truncated header in " + path.string());
  RawDump dump;
  dump.grid = GridSpec{static_cast<int>(n), static_cast<int>(N), L, (flags & 1u) != 0};
  for (std::uint32_t c = 0; c < count; ++c) {
    std::vector<double> v(dump.grid.size());
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw Error(ErrorKind::io, "truncated data in " + path.string());
    dump.components.emplace_back(dump.grid, std::move(v));
  }
  return dump;
}

void write_grid_csv(const std::filesystem::path& path, const std::vector<ScalarGridField>& components,
                    const std::vector<std::string>& names) {
  if (components.empty()) throw Error(ErrorKind::shape, "no components to export");
  const auto& grid = components.front().grid();
  if (grid.n > 2) throw Error(ErrorKind::shape, "CSV export supports n <= 2");
  if (names.size() != components.size()) throw Error(ErrorKind::shape, "one column name per component required");
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  for (int a = 0; a < grid.n; ++a) os << "x" << (a + 1) << ",";
  for (std::size_t c = 0; c < names.size(); ++c) os << names[c] << (c + 1 < names.size() ? "," : "\n");
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto x = grid.point(p);
    for (int a = 0; a < grid.n; ++a) os << x[a] << ",";
    for (std::size_t c = 0; c < components.size(); ++c)
      os << components[c][p] << (c + 1 < components.size() ? "," : "\n");
  }
  if (!os) throw Error(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace nslab
