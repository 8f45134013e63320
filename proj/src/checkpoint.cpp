#include "nslab/checkpoint.hpp"

#include <fstream>
#include <json.hpp>

#include "nslab/error.hpp"
#include "nslab/grid_io.hpp"

namespace nslab {

namespace {

nlohmann::json family_json(const FamilyNorms& f) {
  return {{"sup", f.sup}, {"lipschitz", f.lipschitz}, {"h2", f.h2}};
}

FamilyNorms family_from(const nlohmann::json& j) {
  return FamilyNorms{j.at("sup").get<double>(), j.at("lipschitz").get<double>(), j.at("h2").get<double>()};
}

}  // namespace

void write_checkpoint(const std::filesystem::path& dir, const IterationState& state, const SchemeConfig& cfg,
                      const std::string& config_hash) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create checkpoint directory " + dir.string());
  nlohmann::json manifest;
  manifest["l"] = state.l;
  manifest["nu0"] = cfg.nu0;
  manifest["T"] = state.current.time.T;
  manifest["M"] = state.current.time.M;
  manifest["grid"] = {{"n", state.current.grid.n},
                      {"N", state.current.grid.N},
                      {"L", state.current.grid.L},
                      {"offset", state.current.grid.offset_origin}};
  manifest["config_hash"] = config_hash;
  nlohmann::json norms = nlohmann::json::array();
  for (const auto& nrm : state.increment_norms)
    norms.push_back({{"g", family_json(nrm.g)}, {"dg", family_json(nrm.dg)}, {"h", family_json(nrm.h)},
                     {"combined", nrm.combined()}});
  manifest["increment_norms"] = norms;
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t j = 0; j < state.current.slices.size(); ++j) {
    const auto& s = state.current.slices[j];
    std::vector<ScalarGridField> comps = s.g;
    comps.insert(comps.end(), s.dg.begin(), s.dg.end());
    comps.insert(comps.end(), s.h.begin(), s.h.end());
    const std::string name = "slice_" + std::to_string(j) + ".nsgf";
    write_raw_dump(dir / name, state.current.grid, comps);
    files.push_back(name);
  }
  manifest["slices"] = files;
  std::ofstream os(dir / "manifest.json");
  if (!os) throw Error(ErrorKind::io, "cannot write " + (dir / "manifest.json").string());
  os << manifest.dump(2) << "\n";
}

Checkpoint read_checkpoint(const std::filesystem::path& dir, std::shared_ptr<const DataList> data) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw Error(ErrorKind::io, "no manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::io, std::string("unreadable checkpoint manifest: ") + e.what());
  }
  Checkpoint cp;
  cp.config_hash = manifest.value("config_hash", "");
  cp.nu0 = manifest.at("nu0").get<double>();
  auto& st = cp.state;
  st.l = manifest.at("l").get<int>();
  st.data = std::move(data);
  st.current.time = make_time_grid(manifest.at("T").get<double>(), manifest.at("M").get<int>());
  for (const auto& nrm : manifest.at("increment_norms"))
    st.increment_norms.push_back(
        IncrementNorms{family_from(nrm.at("g")), family_from(nrm.at("dg")), family_from(nrm.at("h"))});
  for (const auto& name : manifest.at("slices")) {
    RawDump dump = read_raw_dump(dir / name.get<std::string>());
    st.current.grid = dump.grid;
    const int comps = sym_count(dump.grid.n + 1);
    const std::size_t expected = static_cast<std::size_t>(comps * (dump.grid.n + 2));
    if (dump.components.size() != expected) throw Error(ErrorKind::io, "checkpoint slice has wrong component count");
    SliceFields s;
    auto it = dump.components.begin();
    s.g.assign(it, it + comps);
    it += comps;
    s.dg.assign(it, it + comps * dump.grid.n);
    it += comps * dump.grid.n;
    s.h.assign(it, it + comps);
    st.current.slices.push_back(std::move(s));
  }
  st.current.validate();
  if (st.data && !(st.data->grid() == st.current.grid))
    throw Error(ErrorKind::validation, "checkpoint grid does not match the configured data");
  return cp;
}

}  // namespace nslab
