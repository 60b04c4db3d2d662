#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fdf/density.hpp"
#include "fdf/error.hpp"
#include "fdf/io.hpp"
#include "fdf/maps.hpp"
#include "fdf/oracle.hpp"
#include "fdf/pipeline.hpp"

namespace fdf {

struct FdfSettings {
  std::size_t delta_cells = kDefaultDeltaCells;
  JacobianSource jacobian = JacobianSource::interpolant;
  bool refine_extrema = true;
  double merge_tol = 1e-9;
  double b_tol = 1e-9;
};

struct OutputSettings {
  std::filesystem::path dir = "out";
};

/// One experiment: a map, an input density on the same domain, the FDF grid
/// and step settings, and an optional Monte Carlo block.
struct ExperimentConfig {
  MapDefinition map;
  DensityKind density = SinPlusTwo{};
  GridSpec grid;
  FdfSettings fdf;
  std::optional<McConfig> mc;
  OutputSettings output;

  [[nodiscard]] PipelineOptions pipeline_options(unsigned threads = 1) const {
    PipelineOptions o;
    o.grid = grid;
    o.partition.merge_tol = fdf.merge_tol;
    o.partition.refine_extrema = fdf.refine_extrema;
    o.b_tol = fdf.b_tol;
    o.delta_cells = fdf.delta_cells;
    o.jacobian = fdf.jacobian;
    o.threads = threads;
    return o;
  }

  [[nodiscard]] DensitySpec density_spec() const {
    return build_density_spec(density, map.alpha, map.beta);
  }
};

namespace detail {

// Reads the keys of one section and remembers which were consumed, so that
// leftovers can be reported as unknown.
class SectionReader {
 public:
  SectionReader(std::string name, const boost::property_tree::ptree* tree)
      : name_(std::move(name)), tree_(tree) {}

  [[nodiscard]] bool present() const noexcept { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return it->second.data();
  }

  std::string text(const std::string& key) {
    auto v = raw(key);
    if (!v) throw input_error("[" + name_ + "] is missing '" + key + "'");
    return *v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    return raw(key).value_or(fallback);
  }

  /// Accepts plain numbers and ratios such as 5/300.
  double number(const std::string& key) { return to_number(key, text(key)); }
  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? to_number(key, *v) : fallback;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
    auto v = raw(key);
    if (!v) {
      if (fallback) return *fallback;
      throw input_error("[" + name_ + "] is missing '" + key + "'");
    }
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
      throw input_error("[" + name_ + "] " + key + " is not an integer: '" + *v + "'");
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw input_error("[" + name_ + "] " + key + " must be true or false");
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, _] : *tree_)
      if (!used_.count(key)) throw input_error("unknown key '" + key + "' in [" + name_ + "]");
  }

 private:
  double to_number(const std::string& key, const std::string& v) const {
    try {
      const auto slash = v.find('/');
      if (slash == std::string::npos) return io::parse_double(v);
      const double den = io::parse_double(std::string_view(v).substr(slash + 1));
      if (den == 0.0) throw input_error("division by zero");
      return io::parse_double(std::string_view(v).substr(0, slash)) / den;
    } catch (const input_error&) {
      throw input_error("[" + name_ + "] " + key + " is not a number: '" + v + "'");
    }
  }

  std::string name_;
  const boost::property_tree::ptree* tree_;
  std::set<std::string> used_;
};

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() ? p : base / p;
}

}  // namespace detail

/// Parses the key-section format. Relative table paths resolve against
/// `base_dir`.
inline ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".") {
  namespace pt = boost::property_tree;
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw input_error(std::string("config parse error: ") + e.what());
  }

  static const std::set<std::string> kSections{"map", "density", "grid", "fdf", "mc", "output"};
  for (const auto& [name, node] : root) {
    if (!kSections.count(name)) throw input_error("unknown config section [" + name + "]");
    if (node.empty() && !node.data().empty())
      throw input_error("config key '" + name + "' is outside any section");
  }
  auto section = [&root](const std::string& name) {
    const auto it = root.find(name);
    return detail::SectionReader(name, it == root.not_found() ? nullptr : &it->second);
  };

  ExperimentConfig cfg;

  auto map = section("map");
  if (!map.present()) throw input_error("config needs a [map] section");
  const std::string type = map.text("type");
  cfg.map.alpha = map.number("alpha");
  cfg.map.beta = map.number("beta");
  if (type == "logistic") {
    Logistic m;
    m.r = map.number("r");
    m.iterations = static_cast<int>(map.integer("iterations"));
    cfg.map.kind = m;
  } else if (type == "oscillator") {
    Oscillator m;
    m.k = map.number("k");
    m.amplitude = map.number("amplitude");
    m.omega = map.number("omega");
    m.t = map.number("t");
    m.phase_scale = map.number("phase_scale", 1.0);
    cfg.map.kind = m;
  } else if (type == "duffing") {
    cfg.map.kind = Duffing{map.number("t_final"), map.number("step")};
  } else if (type == "pendulum") {
    cfg.map.kind = Pendulum{map.number("t_final"), map.number("step")};
  } else if (type == "table") {
    cfg.map.kind = io::read_table_map(detail::resolve(base_dir, map.text("file")));
  } else {
    throw input_error("unknown map type '" + type + "'");
  }
  map.reject_unknown();
  validate(cfg.map);

  auto density = section("density");
  const std::string dtype = density.text("type", "sin_plus_two");
  if (dtype == "sin_plus_two") {
    cfg.density = SinPlusTwo{density.number("omega", 5.0)};
  } else if (dtype == "uniform") {
    cfg.density = Uniform{};
  } else if (dtype == "table") {
    cfg.density = io::read_table_density(detail::resolve(base_dir, density.text("file")));
  } else {
    throw input_error("unknown density type '" + dtype + "'");
  }
  density.reject_unknown();

  auto grid = section("grid");
  cfg.grid.n_div = static_cast<int>(grid.integer("n_div", 400));
  grid.reject_unknown();
  validate(cfg.grid);

  auto fdf = section("fdf");
  const auto cells = fdf.integer("delta_cells", static_cast<std::int64_t>(kDefaultDeltaCells));
  if (cells <= 0) throw input_error("[fdf] delta_cells must be positive");
  cfg.fdf.delta_cells = static_cast<std::size_t>(cells);
  const std::string jac = fdf.text("jacobian", "interpolant");
  if (jac == "interpolant") cfg.fdf.jacobian = JacobianSource::interpolant;
  else if (jac == "analytic") cfg.fdf.jacobian = JacobianSource::analytic;
  else throw input_error("[fdf] jacobian must be 'interpolant' or 'analytic'");
  cfg.fdf.refine_extrema = fdf.flag("refine_extrema", true);
  cfg.fdf.merge_tol = fdf.number("merge_tol", 1e-9);
  cfg.fdf.b_tol = fdf.number("b_tol", 1e-9);
  if (!(cfg.fdf.merge_tol >= 0.0) || !(cfg.fdf.b_tol >= 0.0))
    throw input_error("[fdf] tolerances must be nonnegative");
  fdf.reject_unknown();

  auto mc = section("mc");
  if (mc.present()) {
    McConfig m;
    const auto n = mc.integer("n_samples", 1'000'000);
    const auto bins = mc.integer("n_bins", 200);
    const auto seed = mc.integer("seed", 1);
    if (n <= 0 || bins <= 0 || seed < 0) throw input_error("[mc] values must be positive");
    m.n_samples = static_cast<std::size_t>(n);
    m.n_bins = static_cast<std::size_t>(bins);
    m.seed = static_cast<std::uint64_t>(seed);
    validate(m);
    mc.reject_unknown();
    cfg.mc = m;
  }

  auto output = section("output");
  cfg.output.dir = output.text("dir", "out");
  output.reject_unknown();
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_config(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace fdf
