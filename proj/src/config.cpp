#include "nslab/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "nslab/error.hpp"

namespace nslab {

using nlohmann::json;

namespace {

const char* rate_mode_name(InitialRateMode m) {
  switch (m) {
    case InitialRateMode::zero: return "zero";
    case InitialRateMode::smooth: return "smooth";
    case InitialRateMode::harmonic: return "harmonic";
  }
  return "zero";
}

// Reads one JSON object, remembering which keys were consumed so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw Error(ErrorKind::validation, where() + ": expected an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    try {
      out = node_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::validation, field(key) + ": wrong type");
    }
  }

  template <class T>
  void get_optional(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!node_.contains(key) || node_.at(key).is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }
  Reader child(const std::string& key) {
    seen_.insert(key);
    return Reader(node_.at(key), field(key));
  }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) throw Error(ErrorKind::validation, "unknown key " + field(it.key()));
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::flat: return "flat";
    case DataKind::singular: return "singular";
    case DataKind::gauge_wave: return "gauge_wave";
  }
  return "singular";
}

DataKind data_kind_from(const std::string& s, const std::string& path) {
  if (s == "flat") return DataKind::flat;
  if (s == "singular") return DataKind::singular;
  if (s == "gauge_wave") return DataKind::gauge_wave;
  throw Error(ErrorKind::validation, path + ": expected one of flat, singular, gauge_wave");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::validation, msg);
}

void validate_config(const RunConfig& c) {
  try {
    make_grid(c.grid.n, c.grid.N, c.grid.L, c.grid.offset_origin);
  } catch (const Error& e) {
    throw Error(ErrorKind::validation, std::string("grid: ") + e.what());
  }
  const auto& d = c.data;
  if (d.kind == DataKind::singular) {
    validate(d.profile, c.grid.L);
    for (int i : d.perturbed) require(i >= 1 && i <= c.grid.n, "data.perturbed entries must lie in 1..n");
    require(d.min_margin > 0, "data.min_margin must be positive");
  }
  if (d.kind == DataKind::gauge_wave) {
    require(std::abs(d.gauge_wave.amplitude) < 1, "data.gauge_wave.amplitude must satisfy |A| < 1");
    const double periods = 2 * c.grid.L / d.gauge_wave.wavelength;
    require(d.gauge_wave.wavelength > 0 && std::abs(periods - std::round(periods)) < 1e-9,
            "data.gauge_wave.wavelength must divide the box length 2L");
  }
  validate(c.scheme);
  require(c.max_halvings >= 0, "time.max_halvings must be non-negative");
  for (std::size_t i = 0; i < c.nu_sequence.size(); ++i) {
    require(c.nu_sequence[i] > 0, "scheme.nu_sequence entries must be positive");
    if (i > 0) require(c.nu_sequence[i] < c.nu_sequence[i - 1], "scheme.nu_sequence must be decreasing");
  }
  const auto& g = c.diagnostics;
  require(g.shell_ratio > 1, "diagnostics.shell_ratio must exceed 1");
  require(g.time_order == 2 || g.time_order == 4, "diagnostics.time_order must be 2 or 4");
  if (g.r_excl) require(*g.r_excl >= 0, "diagnostics.r_excl must be non-negative");
  require(g.exclusion_shape == "auto" || g.exclusion_shape == "ball" || g.exclusion_shape == "slab" ||
              g.exclusion_shape == "none",
          "diagnostics.exclusion_shape must be one of auto, ball, slab, none");
  for (double r : g.radii) require(r > 0, "diagnostics.radii must be positive");
  for (std::size_t i = 0; i < g.kernel_nus.size(); ++i) {
    require(g.kernel_nus[i] > 0, "diagnostics.kernel_nus entries must be positive");
    if (i > 0) require(g.kernel_nus[i] < g.kernel_nus[i - 1], "diagnostics.kernel_nus must be decreasing");
  }
  if (g.sobolev_s) require(*g.sobolev_s > c.grid.n / 2.0 + 1, "diagnostics.sobolev_s must exceed n/2 + 1");
  for (const auto& cv : g.curves) require(cv.samples >= 2, "diagnostics.curves[].samples must be at least 2");
}

std::array<double, 4> point_from(const json& j, int dim, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw Error(ErrorKind::validation, path + ": expected " + std::to_string(dim) + " coordinates (t, x^1, ...)");
  std::array<double, 4> p{};
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::validation, path + ": coordinates must be numbers");
    p[i] = j[i].get<double>();
  }
  return p;
}

}  // namespace

RunConfig config_from_json(const json& root) {
  RunConfig c;
  Reader r(root, "");
  if (r.has("grid")) {
    Reader g = r.child("grid");
    g.get("n", c.grid.n);
    g.get("N", c.grid.N);
    g.get("L", c.grid.L);
    g.get("offset", c.grid.offset_origin);
    g.finish();
  } else {
    throw Error(ErrorKind::validation, "missing required section grid");
  }
  if (r.has("time")) {
    Reader t = r.child("time");
    t.get("T", c.scheme.T);
    t.get("M", c.scheme.M);
    t.get("auto_T", c.auto_T);
    t.get("max_halvings", c.max_halvings);
    t.finish();
  }
  if (r.has("data")) {
    Reader d = r.child("data");
    std::string kind = data_kind_name(c.data.kind);
    d.get("kind", kind);
    c.data.kind = data_kind_from(kind, d.field("kind"));
    d.get("C", c.data.profile.C);
    d.get("alpha", c.data.profile.alpha);
    d.get("delta_supp", c.data.profile.delta_supp);
    d.get("eps_supp", c.data.profile.eps_supp);
    d.get("amp", c.data.amp);
    std::string h0 = rate_mode_name(c.data.h0_mode);
    d.get("h0_mode", h0);
    if (h0 == "zero")
      c.data.h0_mode = InitialRateMode::zero;
    else if (h0 == "smooth")
      c.data.h0_mode = InitialRateMode::smooth;
    else if (h0 == "harmonic")
      c.data.h0_mode = InitialRateMode::harmonic;
    else
      throw Error(ErrorKind::validation, "data.h0_mode must be zero, smooth or harmonic");
    d.get("h0_amp", c.data.h0_amp);
    d.get("perturbed", c.data.perturbed);
    d.get("min_margin", c.data.min_margin);
    if (d.has("gauge_wave")) {
      Reader w = d.child("gauge_wave");
      w.get("amplitude", c.data.gauge_wave.amplitude);
      w.get("wavelength", c.data.gauge_wave.wavelength);
      w.finish();
    }
    d.finish();
  } else {
    throw Error(ErrorKind::validation, "missing required section data");
  }
  if (r.has("scheme")) {
    Reader s = r.child("scheme");
    s.get("nu0", c.scheme.nu0);
    s.get("nu_sequence", c.nu_sequence);
    s.get("max_iters", c.scheme.max_iters);
    s.get("tol_fix", c.scheme.tol_fix);
    s.get("tol_contract", c.scheme.tol_contract);
    std::string pre = c.scheme.prefactor == Prefactor::g00 ? "g00" : "inv_g00";
    s.get("prefactor", pre);
    if (pre != "g00" && pre != "inv_g00") throw Error(ErrorKind::validation, "scheme.prefactor must be g00 or inv_g00");
    c.scheme.prefactor = pre == "g00" ? Prefactor::g00 : Prefactor::inv_g00;
    std::string endpoint =
        c.scheme.endpoint == EndpointRule::approximate_identity ? "approximate_identity" : "exponential_product";
    s.get("endpoint", endpoint);
    if (endpoint != "approximate_identity" && endpoint != "exponential_product")
      throw Error(ErrorKind::validation, "scheme.endpoint must be approximate_identity or exponential_product");
    c.scheme.endpoint =
        endpoint == "approximate_identity" ? EndpointRule::approximate_identity : EndpointRule::exponential_product;
    s.get("eps_det", c.scheme.eps_det);
    s.get("patience", c.scheme.patience);
    s.get("enforce_resolution", c.enforce_resolution);
    s.finish();
  }
  if (r.has("diagnostics")) {
    Reader g = r.child("diagnostics");
    g.get("radii", c.diagnostics.radii);
    g.get("shell_ratio", c.diagnostics.shell_ratio);
    g.get_optional("r_excl", c.diagnostics.r_excl);
    g.get("exclusion_shape", c.diagnostics.exclusion_shape);
    g.get("time_order", c.diagnostics.time_order);
    g.get("kernel_nus", c.diagnostics.kernel_nus);
    g.get_optional("sobolev_s", c.diagnostics.sobolev_s);
    if (g.has("curves")) {
      const json& arr = g.raw("curves");
      if (!arr.is_array()) throw Error(ErrorKind::validation, "diagnostics.curves: expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "diagnostics.curves[" + std::to_string(i) + "]";
        Reader cv(arr[i], path);
        CurveSpec spec;
        cv.get("name", spec.name);
        cv.get("samples", spec.samples);
        if (!cv.has("from") || !cv.has("to")) throw Error(ErrorKind::validation, path + ": needs from and to");
        spec.from = point_from(cv.raw("from"), c.grid.n + 1, path + ".from");
        spec.to = point_from(cv.raw("to"), c.grid.n + 1, path + ".to");
        cv.finish();
        c.diagnostics.curves.push_back(spec);
      }
    }
    g.finish();
  }
  r.get("seed", c.seed);
  r.finish();
  validate_config(c);
  return c;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw Error(ErrorKind::validation, "parse error at line " + std::to_string(line) + ": " + e.what());
  }
  return config_from_json(root);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["grid"] = {{"n", c.grid.n}, {"N", c.grid.N}, {"L", c.grid.L}, {"offset", c.grid.offset_origin}};
  j["time"] = {{"T", c.scheme.T}, {"M", c.scheme.M}, {"auto_T", c.auto_T}, {"max_halvings", c.max_halvings}};
  const auto& d = c.data;
  j["data"] = {{"kind", data_kind_name(d.kind)},
               {"C", d.profile.C},
               {"alpha", d.profile.alpha},
               {"delta_supp", d.profile.delta_supp},
               {"eps_supp", d.profile.eps_supp},
               {"amp", d.amp},
               {"h0_mode", rate_mode_name(d.h0_mode)},
               {"h0_amp", d.h0_amp},
               {"perturbed", d.perturbed},
               {"min_margin", d.min_margin},
               {"gauge_wave", {{"amplitude", d.gauge_wave.amplitude}, {"wavelength", d.gauge_wave.wavelength}}}};
  const auto& s = c.scheme;
  j["scheme"] = {{"nu0", s.nu0},
                 {"nu_sequence", c.nu_sequence},
                 {"max_iters", s.max_iters},
                 {"tol_fix", s.tol_fix},
                 {"tol_contract", s.tol_contract},
                 {"prefactor", s.prefactor == Prefactor::g00 ? "g00" : "inv_g00"},
                 {"endpoint",
                  s.endpoint == EndpointRule::approximate_identity ? "approximate_identity" : "exponential_product"},
                 {"eps_det", s.eps_det},
                 {"patience", s.patience},
                 {"enforce_resolution", c.enforce_resolution}};
  const auto& g = c.diagnostics;
  json curves = json::array();
  for (const auto& cv : g.curves) {
    const int dim = c.grid.n + 1;
    curves.push_back({{"name", cv.name},
                      {"samples", cv.samples},
                      {"from", std::vector<double>(cv.from.begin(), cv.from.begin() + dim)},
                      {"to", std::vector<double>(cv.to.begin(), cv.to.begin() + dim)}});
  }
  j["diagnostics"] = {{"radii", g.radii},
                      {"shell_ratio", g.shell_ratio},
                      {"r_excl", g.r_excl ? json(*g.r_excl) : json(nullptr)},
                      {"exclusion_shape", g.exclusion_shape},
                      {"time_order", g.time_order},
                      {"kernel_nus", g.kernel_nus},
                      {"sobolev_s", g.sobolev_s ? json(*g.sobolev_s) : json(nullptr)},
                      {"curves", curves}};
  j["seed"] = c.seed;
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::io, "hashing failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < 8 && i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

DataList build_data(const RunConfig& cfg) {
  const GridSpec grid = make_grid(cfg.grid.n, cfg.grid.N, cfg.grid.L, cfg.grid.offset_origin);
  switch (cfg.data.kind) {
    case DataKind::flat: return build_flat_data(grid);
    case DataKind::gauge_wave: return build_gauge_wave_data(grid, cfg.data.gauge_wave);
    case DataKind::singular: {
      DataOptions opt;
      opt.h0_mode = cfg.data.h0_mode;
      opt.h0_amp = cfg.data.h0_amp;
      opt.perturbed = cfg.data.perturbed;
      opt.min_margin = cfg.data.min_margin;
      return build_singular_data(grid, cfg.data.profile, cfg.data.amp, opt);
    }
  }
  throw Error(ErrorKind::configuration, "unknown data kind");
}

SingularGeometry singular_geometry(const RunConfig&) {
  // The profile depends on x^1 only, so its singular set is the plane x^1 = 0.
  return SingularGeometry::hyperplane;
}

ExclusionRegion exclusion_region(const RunConfig& cfg) {
  ExclusionRegion e;
  const std::string& shape = cfg.diagnostics.exclusion_shape;
  if (shape == "none" || (shape == "auto" && cfg.data.kind != DataKind::singular)) return e;
  e.shape = shape == "ball" ? ExclusionRegion::Shape::ball : ExclusionRegion::Shape::slab;
  e.axis = 0;
  e.radius = cfg.diagnostics.r_excl.value_or(4 * cfg.grid.spacing());
  return e;
}

std::vector<double> blowup_radii(const RunConfig& cfg) {
  if (!cfg.diagnostics.radii.empty()) return cfg.diagnostics.radii;
  const double h = cfg.grid.spacing();
  if (cfg.data.kind != DataKind::singular) return geometric_radii(4 * h, 40 * h, 6);
  // Keep the outermost shell on the cutoff plateau.
  const double r_max = 0.9 * cfg.data.profile.delta_supp / cfg.diagnostics.shell_ratio;
  if (r_max / 10 < 4 * h) return {};
  return geometric_radii(r_max / 10, r_max, 6);
}

CurveSample build_curve(const CurveSpec& spec, int dim) {
  std::vector<double> s(spec.samples);
  std::vector<std::array<double, 4>> pos(spec.samples);
  for (int j = 0; j < spec.samples; ++j) {
    const double u = static_cast<double>(j) / (spec.samples - 1);
    s[j] = u;
    for (int a = 0; a < dim; ++a) pos[j][a] = spec.from[a] + u * (spec.to[a] - spec.from[a]);
  }
  return make_curve(dim, std::move(s), std::move(pos));
}

}  // namespace nslab
