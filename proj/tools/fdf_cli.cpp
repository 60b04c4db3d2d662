// Command-line front end: runs the FDF pipeline and the Monte Carlo baseline
// from an experiment config and writes CSV/JSON artifacts.
//
// Exit codes: 0 success, 2 config or input error, 3 degenerate input,
// 4 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fdf/fdf.hpp"

namespace {

namespace fs = std::filesystem;
using fdf::io::format_double;
using fdf::io::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct Context {
  fdf::ExperimentConfig cfg;
  fs::path out;
  unsigned threads = 1;
};

Context prepare(const CommonArgs& args) {
  Context ctx;
  ctx.cfg = fdf::load_config(args.config);
  if (args.seed) {
    if (!ctx.cfg.mc) ctx.cfg.mc = fdf::McConfig{};
    ctx.cfg.mc->seed = *args.seed;
  }
  ctx.out = args.out.empty() ? ctx.cfg.output.dir : fs::path(args.out);
  ctx.threads = args.threads == 0 ? fdf::default_threads() : args.threads;
  fs::create_directories(ctx.out);
  return ctx;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fdf::input_error("cannot write " + path.string());
  writer(out);
}

json structure_summary(const fdf::ExperimentConfig& cfg, const fdf::FdfResult& r) {
  return {{"map", fdf::io::describe(cfg.map)},
          {"map_fingerprint", fdf::io::fingerprint(cfg.map)},
          {"n_div", cfg.grid.n_div},
          {"g_min", r.table.b.front()},
          {"g_max", r.table.b.back()},
          {"S", r.partition.S},
          {"b", r.table.b}};
}

void print_structure(const fdf::FdfResult& r) {
  std::cout << "k = " << r.partition.branches() << '\n'
            << "ell = " << r.table.b.size() - 1 << '\n'
            << "S = " << format_double(r.partition.S) << '\n'
            << "b =";
  for (double b : r.table.b) std::cout << ' ' << format_double(b);
  std::cout << '\n';
}

int cmd_partition(const CommonArgs& args) {
  const Context ctx = prepare(args);
  const auto r = fdf::run_structure(ctx.cfg.map, ctx.cfg.pipeline_options(ctx.threads));
  json j = fdf::io::partition_json(r.partition, r.table);
  j["transition_check"] = fdf::transition_check(r.table);
  fdf::io::write_json(ctx.out / "partition.json", j);
  print_structure(r);
  return kExitOk;
}

int cmd_unfold(const CommonArgs& args) {
  const Context ctx = prepare(args);
  const auto r = fdf::run_structure(ctx.cfg.map, ctx.cfg.pipeline_options(ctx.threads));
  write_file(ctx.out / "eta.csv", [&](std::ostream& os) { fdf::io::write_eta_csv(os, r.unfolded); });
  std::cout << "knots = " << r.unfolded.knots_u.size() << '\n'
            << "S = " << format_double(r.unfolded.S) << '\n';
  return kExitOk;
}

int cmd_density(const CommonArgs& args) {
  const Context ctx = prepare(args);
  const auto spec = ctx.cfg.density_spec();
  const auto r = fdf::run_fdf(ctx.cfg.map, spec, ctx.cfg.pipeline_options(ctx.threads));
  const auto& curve = *r.curve;

  write_file(ctx.out / "eta.csv", [&](std::ostream& os) { fdf::io::write_eta_csv(os, r.unfolded); });
  write_file(ctx.out / "mu_y.csv", [&](std::ostream& os) { fdf::io::write_curve_csv(os, curve); });
  json meta = structure_summary(ctx.cfg, r);
  meta["delta"] = curve.delta;
  meta["mass"] = curve.mass;
  meta["intervals"] = fdf::io::intervals_json(curve);
  meta["jacobian"] = ctx.cfg.fdf.jacobian == fdf::JacobianSource::analytic ? "analytic" : "interpolant";
  fdf::io::write_json(ctx.out / "meta.json", meta);
  fdf::io::write_json(ctx.out / "timings.json", {{"sample", r.timings.sample},
                                                 {"partition", r.timings.partition},
                                                 {"unfold", r.timings.unfold},
                                                 {"density", r.timings.density},
                                                 {"fdf_total", r.timings.total()}});
  print_structure(r);
  std::cout << "points = " << curve.points.size() << '\n'
            << "mass = " << format_double(curve.mass) << '\n'
            << "fdf_seconds = " << r.timings.total() << '\n';
  return kExitOk;
}

const fdf::McConfig& require_mc(const Context& ctx, const char* command) {
  if (!ctx.cfg.mc)
    throw fdf::input_error(std::string("'") + command +
                           "' needs an [mc] section in the config (n_samples, n_bins, seed)");
  return *ctx.cfg.mc;
}

json mc_summary(const fdf::McConfig& mc, const fdf::Histogram& h) {
  return {{"n_samples", mc.n_samples},
          {"n_bins", mc.n_bins},
          {"seed", mc.seed},
          {"clamped_fraction", h.clamped_fraction()},
          {"range", {h.edges.front(), h.edges.back()}},
          {"mass", h.mass()}};
}

int cmd_mc(const CommonArgs& args) {
  const Context ctx = prepare(args);
  const auto& mc = require_mc(ctx, "mc");
  const auto spec = ctx.cfg.density_spec();
  const auto start = std::chrono::steady_clock::now();
  const auto hist = fdf::mc_density(ctx.cfg.map, spec, mc, ctx.cfg.grid, ctx.threads);
  const double mc_seconds = seconds_since(start);

  write_file(ctx.out / "hist.csv", [&](std::ostream& os) { fdf::io::write_histogram_csv(os, hist); });
  json j = mc_summary(mc, hist);
  j["map_fingerprint"] = fdf::io::fingerprint(ctx.cfg.map);
  fdf::io::write_json(ctx.out / "mc.json", j);
  fdf::io::write_json(ctx.out / "timings.json", {{"mc_seconds", mc_seconds}});
  std::cout << "bins = " << hist.bins() << '\n'
            << "clamped_fraction = " << format_double(hist.clamped_fraction()) << '\n'
            << "mc_seconds = " << mc_seconds << '\n';
  return kExitOk;
}

int cmd_compare(const CommonArgs& args) {
  const Context ctx = prepare(args);
  const auto& mc = require_mc(ctx, "compare");
  const auto spec = ctx.cfg.density_spec();

  const auto r = fdf::run_fdf(ctx.cfg.map, spec, ctx.cfg.pipeline_options(ctx.threads));
  const auto& curve = *r.curve;
  const auto start = std::chrono::steady_clock::now();
  const auto hist =
      fdf::mc_density(ctx.cfg.map, spec, mc, r.table.b.front(), r.table.b.back(), ctx.threads);
  const double mc_seconds = seconds_since(start);
  const auto metrics = fdf::compare(curve, hist);

  write_file(ctx.out / "mu_y.csv", [&](std::ostream& os) { fdf::io::write_curve_csv(os, curve); });
  write_file(ctx.out / "hist.csv", [&](std::ostream& os) { fdf::io::write_histogram_csv(os, hist); });
  json j = mc_summary(mc, hist);
  j["l1"] = metrics.l1;
  j["sup"] = metrics.sup;
  j["fdf_mass"] = curve.mass;
  j["map_fingerprint"] = fdf::io::fingerprint(ctx.cfg.map);
  fdf::io::write_json(ctx.out / "metrics.json", j);
  fdf::io::write_json(ctx.out / "timings.json",
                      {{"fdf_seconds", r.timings.total()}, {"mc_seconds", mc_seconds}});

  std::cout << "l1 = " << format_double(metrics.l1) << '\n'
            << "sup = " << format_double(metrics.sup) << '\n'
            << "fdf_seconds = " << r.timings.total() << '\n'
            << "mc_seconds = " << mc_seconds << '\n';
  return kExitOk;
}

int exit_code(const fdf::error& e) {
  switch (e.kind()) {
    case fdf::error_kind::input: return kExitConfig;
    case fdf::error_kind::degenerate: return kExitDegenerate;
    case fdf::error_kind::numerical: return kExitNumerical;
  }
  return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Densities of Y = g(X) for piecewise monotone maps via domain folding"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*handler)(const CommonArgs&) = nullptr;
  const CLI::App* chosen = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const CommonArgs&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "experiment config file")->required();
    sub->add_option("--out", args.out, "output directory (overrides [output] dir)");
    sub->add_option("--seed", args.seed, "Monte Carlo seed (overrides [mc] seed)");
    sub->add_option("--threads", args.threads, "worker threads (default: all cores)");
    sub->callback([&handler, &chosen, sub, fn] {
      handler = fn;
      chosen = sub;
    });
  };
  add("partition", "detect extrema, write partition.json", cmd_partition);
  add("unfold", "build the unfolded map, write eta.csv", cmd_unfold);
  add("density", "run the FDF pipeline, write eta.csv, mu_y.csv, meta.json", cmd_density);
  add("mc", "run the Monte Carlo baseline, write hist.csv", cmd_mc);
  add("compare", "run both pipelines, write hist.csv, mu_y.csv, metrics.json", cmd_compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    return handler(args);
  } catch (const fdf::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == fdf::error_kind::input && chosen) std::cerr << chosen->help();
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
