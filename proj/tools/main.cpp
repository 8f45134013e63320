#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nslab/checkpoint.hpp"
#include "nslab/config.hpp"
#include "nslab/data.hpp"
#include "nslab/diagnostics.hpp"
#include "nslab/error.hpp"
#include "nslab/grid_io.hpp"
#include "nslab/heat_kernel.hpp"
#include "nslab/picard.hpp"
#include "nslab/report.hpp"

namespace fs = std::filesystem;
using namespace nslab;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string checkpoint;
  std::string resume;
  bool exact = false;
  bool evolved = false;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Session {
  RunConfig cfg;
  fs::path out;
  RunReport report;

  explicit Session(const Options& o) : cfg(load(o)), out(o.out), report(cfg) { fs::create_directories(out); }

  static RunConfig load(const Options& o) {
    RunConfig cfg = load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
  }

  int finish() {
    emit_report(report, out);
    std::cout << "report: " << (out / "report.json").string() << "\n";
    return report.all_passed() ? 0 : 2;
  }
};

std::vector<ScalarGridField> slice_components(const SliceFields& f) {
  std::vector<ScalarGridField> c = f.g;
  c.insert(c.end(), f.dg.begin(), f.dg.end());
  c.insert(c.end(), f.h.begin(), f.h.end());
  return c;
}

std::shared_ptr<const DataList> admitted_data(Session& s) {
  Stopwatch sw;
  auto data = std::make_shared<const DataList>(build_data(s.cfg));
  s.report.timing("build_data", sw.seconds());
  if (s.cfg.diagnostics.sobolev_s) {
    auto copy = std::make_shared<DataList>(*data);
    copy->admissibility = check_admissible(*copy, *s.cfg.diagnostics.sobolev_s);
    data = copy;
  }
  s.report.set("admissibility", to_json(*data->admissibility));
  s.report.check("admissibility", data->admissibility->passed);
  return data;
}

FixedPointResult evolve(Session& s, const DataList& data, const Options& o) {
  Stopwatch sw;
  FixedPointResult result;
  SchemeConfig scheme = s.cfg.scheme;
  if (!o.resume.empty()) {
    auto cp = read_checkpoint(o.resume, std::make_shared<const DataList>(data));
    if (cp.config_hash != config_hash(s.cfg))
      std::cerr << "warning: checkpoint was written by a different configuration\n";
    scheme.T = cp.state.current.time.T;
    FixedPointOptions opt;
    opt.resume = std::move(cp.state);
    if (!o.checkpoint.empty())
      opt.on_iteration = [&](const IterationState& st) { write_checkpoint(o.checkpoint, st, scheme, config_hash(s.cfg)); };
    result = run_fixed_point(data, scheme, opt);
  } else if (s.cfg.auto_T) {
    result = run_fixed_point_auto_T(data, scheme, s.cfg.max_halvings);
    if (!o.checkpoint.empty()) write_checkpoint(o.checkpoint, result.state, scheme, config_hash(s.cfg));
  } else {
    FixedPointOptions opt;
    if (!o.checkpoint.empty())
      opt.on_iteration = [&](const IterationState& st) { write_checkpoint(o.checkpoint, st, scheme, config_hash(s.cfg)); };
    result = run_fixed_point(data, scheme, opt);
  }
  s.report.timing("evolve", sw.seconds());
  s.report.set("contraction", to_json(result.record));
  write_contraction_csv(s.out / "contraction.csv", result.record);
  s.report.check("fixed_point_converged", result.record.converged,
                 "iterations " + std::to_string(result.record.iterations));
  return result;
}

void monitors(Session& s, const History& fields) {
  const auto sig = signature_monitor(fields);
  s.report.set("signature", to_json(sig));
  write_signature_csv(s.out / "signature.csv", sig);
  s.report.check("signature_preserved", sig.first_failure < 0);

  const auto con = constraint_monitor(fields, exclusion_region(s.cfg), s.cfg.scheme.eps_det);
  s.report.set("constraint", to_json(con));
  write_constraint_csv(s.out / "constraint.csv", con);
}

ResidualReport residual(Session& s, const History& fields) {
  ResidualOptions opt;
  opt.prefactor = s.cfg.scheme.prefactor;
  opt.exclusion = exclusion_region(s.cfg);
  opt.time_order = s.cfg.diagnostics.time_order;
  opt.eps_det = s.cfg.scheme.eps_det;
  Stopwatch sw;
  auto r = harmonic_residual(fields, opt);
  s.report.timing("residual", sw.seconds());
  s.report.set("residual", to_json(r));
  return r;
}

void blowup(Session& s, const DataList& data) {
  Stopwatch sw;
  const auto R = data_slice_curvature(data, s.cfg.scheme.prefactor, s.cfg.scheme.eps_det);
  const auto exclusion = exclusion_region(s.cfg);
  json curv = {{"sup_all", R.sup_norm()},
               {"sup_outside_exclusion", R.sup_norm(exclusion.keep(R.grid()))},
               {"finite", R.all_finite()}};
  s.report.set("curvature", curv);
  s.report.check("curvature_finite_outside_exclusion", R.all_finite());
  const auto radii = blowup_radii(s.cfg);
  if (s.cfg.data.kind != DataKind::singular) {
    s.report.skip("blowup_fit", "data carry no singular profile");
  } else if (radii.empty()) {
    s.report.skip("blowup_fit", "grid too coarse for a one-decade radius window at or above 4h on the cutoff plateau");
  } else {
    const auto fit = fit_blowup_exponent(R, singular_geometry(s.cfg), radii, s.cfg.diagnostics.shell_ratio);
    s.report.set("blowup_fit", to_json(fit));
    write_blowup_csv(s.out / "blowup.csv", fit);
  }
  s.report.timing("curvature", sw.seconds());
}

void kernel_table(Session& s) {
  Stopwatch sw;
  const GridSpec grid = make_grid(s.cfg.grid.n, s.cfg.grid.N, s.cfg.grid.L, s.cfg.grid.offset_origin);
  const auto t = verify_uniform_l1(s.cfg.diagnostics.kernel_nus, s.cfg.scheme.T, grid);
  s.report.timing("verify_kernel", sw.seconds());
  s.report.set("kernel_table", to_json(t));
  write_kernel_csv(s.out / "kernel_table.csv", t);
  s.report.check("kernel_lipschitz_bound", t.lipschitz_bound_holds);
}

void gaps(Session& s, const History& fields) {
  if (s.cfg.diagnostics.curves.empty()) {
    s.report.skip("gap_lengths", "no curves configured");
    return;
  }
  json arr = json::array();
  for (const auto& spec : s.cfg.diagnostics.curves) {
    const auto curve = build_curve(spec, fields.grid.n + 1);
    arr.push_back({{"name", spec.name},
                   {"as_written", gap_length(curve, fields, GapConvention::as_written)},
                   {"root_sum_squares", gap_length(curve, fields, GapConvention::root_sum_squares)}});
  }
  s.report.set("gap_lengths", arr);
}

int cmd_build_data(const Options& o) {
  Session s(o);
  const auto data = admitted_data(s);
  write_raw_dump(s.out / "data.nsgf", data->grid(), slice_components(data->fields));
  if (data->grid().n <= 2) {
    std::vector<std::string> names;
    for (int c = 0; c < data->fields.components(); ++c) names.push_back("g" + std::to_string(c));
    write_grid_csv(s.out / "data_g.csv", data->fields.g, names);
  }
  return s.finish();
}

int cmd_check_data(const Options& o) {
  Session s(o);
  const auto data = admitted_data(s);
  std::cout << "admissible: " << (data->admissibility->passed ? "yes" : "no")
            << "  lorentz margin " << data->admissibility->lorentz.margin << "\n";
  return s.finish();
}

int cmd_evolve(const Options& o) {
  Session s(o);
  const auto data = admitted_data(s);
  const auto result = evolve(s, *data, o);
  monitors(s, result.fields());
  std::cout << "converged: " << (result.record.converged ? "yes" : "no") << " after " << result.record.iterations
            << " iterations, T = " << result.record.T << "\n";
  const int code = s.finish();
  return result.record.converged ? code : 3;
}

int cmd_sweep(const Options& o) {
  Session s(o);
  const auto data = admitted_data(s);
  if (s.cfg.nu_sequence.size() < 2) {
    s.report.skip("sweep", "nu_sequence needs at least two viscosities");
    return s.finish();
  }
  Stopwatch sw;
  const auto sweep = viscosity_sweep(*data, s.cfg.scheme, s.cfg.nu_sequence, exclusion_region(s.cfg),
                                     ResolutionPolicy{s.cfg.enforce_resolution});
  s.report.timing("sweep", sw.seconds());
  s.report.set("sweep", to_json(sweep));
  write_sweep_csv(s.out / "sweep.csv", sweep);
  residual(s, sweep.solutions.back());
  return s.finish();
}

int cmd_residual(const Options& o) {
  Session s(o);
  if (o.exact) {
    if (s.cfg.data.kind != DataKind::gauge_wave) throw Error(ErrorKind::configuration, "--exact requires gauge_wave data");
    const GridSpec grid = make_grid(s.cfg.grid.n, s.cfg.grid.N, s.cfg.grid.L, s.cfg.grid.offset_origin);
    residual(s, s.cfg.data.gauge_wave.history(grid, s.cfg.scheme.time()));
  } else {
    const auto data = admitted_data(s);
    residual(s, evolve(s, *data, o).fields());
  }
  return s.finish();
}

int cmd_curvature(const Options& o) {
  Session s(o);
  const auto data = admitted_data(s);
  blowup(s, *data);
  if (o.evolved) {
    const auto result = evolve(s, *data, o);
    const auto hist = curvature_history(result.fields(), exclusion_region(s.cfg), s.cfg.scheme.eps_det);
    write_curvature_csv(s.out / "curvature.csv", hist);
  }
  return s.finish();
}

int cmd_gap_length(const Options& o) {
  Session s(o);
  const auto data = admitted_data(s);
  gaps(s, evolve(s, *data, o).fields());
  return s.finish();
}

int cmd_verify_kernel(const Options& o) {
  Session s(o);
  kernel_table(s);
  return s.finish();
}

int cmd_report(const Options& o) {
  Session s(o);
  const auto data = admitted_data(s);
  blowup(s, *data);
  kernel_table(s);
  const auto result = evolve(s, *data, o);
  monitors(s, result.fields());
  residual(s, result.fields());
  gaps(s, result.fields());
  if (s.cfg.nu_sequence.size() >= 2) {
    const auto sweep = viscosity_sweep(*data, s.cfg.scheme, s.cfg.nu_sequence, exclusion_region(s.cfg),
                                       ResolutionPolicy{s.cfg.enforce_resolution});
    s.report.set("sweep", to_json(sweep));
    write_sweep_csv(s.out / "sweep.csv", sweep);
  } else {
    s.report.skip("sweep", "nu_sequence needs at least two viscosities");
  }
  return s.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous Picard solver for the harmonic-gauge Einstein system"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "Override the configured seed");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"build-data", "Build and dump the initial data", cmd_build_data},
      {"check-data", "Check admissibility of the initial data", cmd_check_data},
      {"evolve", "Run the Picard iteration", cmd_evolve},
      {"sweep", "Run a vanishing-viscosity sweep", cmd_sweep},
      {"residual", "Residual of the inviscid system", cmd_residual},
      {"curvature", "Scalar curvature and blow-up fit", cmd_curvature},
      {"gap-length", "Generalized affine parameter lengths of configured curves", cmd_gap_length},
      {"verify-kernel", "Uniform L1 bounds of the heat kernel derivative", cmd_verify_kernel},
      {"report", "Run every stage and write the master report", cmd_report},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    if (std::string(c.name) == "evolve" || std::string(c.name) == "report" || std::string(c.name) == "residual") {
      sub->add_option("--checkpoint", o.checkpoint, "Write the latest iterate to this directory");
      sub->add_option("--resume", o.resume, "Resume from a checkpoint directory");
    }
    if (std::string(c.name) == "residual") sub->add_flag("--exact", o.exact, "Use the exact gauge-wave history");
    if (std::string(c.name) == "curvature") sub->add_flag("--evolved", o.evolved, "Also record curvature along the evolution");
    sub->callback([&selected, run = c.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    return selected(o);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 5;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
