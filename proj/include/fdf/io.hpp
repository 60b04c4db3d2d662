#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ios>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdf/density.hpp"
#include "fdf/error.hpp"
#include "fdf/maps.hpp"
#include "fdf/oracle.hpp"
#include "fdf/partition.hpp"
#include "fdf/unfold.hpp"

namespace fdf::io {

using nlohmann::json;

/// 17 significant digits, so every double round-trips exactly.
inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw input_error("not a number: '" + std::string(s) + "'");
  return v;
}

/// Rows of a comma-separated file with a header. The header must match
/// `expected` column for column.
inline std::vector<std::vector<double>> read_csv(std::istream& in,
                                                 const std::vector<std::string>& expected) {
  std::string line;
  if (!std::getline(in, line)) throw input_error("CSV input is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      header.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
    }
  }
  if (header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw input_error("CSV header must be '" + want + "'");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      try {
        row.push_back(parse_double(rest.substr(0, comma)));
      } catch (const input_error& e) {
        throw input_error("line " + std::to_string(line_no) + ": " + e.what());
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != expected.size())
      throw input_error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(expected.size()) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path.string());
  return in;
}

inline TableMap read_table_map(std::istream& in) {
  TableMap t;
  for (const auto& row : read_csv(in, {"x", "y"})) {
    t.xs.push_back(row[0]);
    t.ys.push_back(row[1]);
  }
  return t;
}

inline TableMap read_table_map(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_table_map(in);
}

inline TableDensity read_table_density(std::istream& in) {
  TableDensity t;
  for (const auto& row : read_csv(in, {"x", "weight"})) {
    t.xs.push_back(row[0]);
    t.weights.push_back(row[1]);
  }
  return t;
}

inline TableDensity read_table_density(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_table_density(in);
}

inline void write_curve_csv(std::ostream& out, const DensityCurve& curve) {
  out << "y,mu_y,interval_id\n";
  for (const auto& p : curve.points)
    out << format_double(p.y) << ',' << format_double(p.mu) << ',' << p.interval << '\n';
}

/// Points only; interval cell layout lives in the JSON metadata.
inline DensityCurve read_curve_csv(std::istream& in) {
  DensityCurve c;
  for (const auto& row : read_csv(in, {"y", "mu_y", "interval_id"})) {
    if (row[2] < 1 || row[2] != static_cast<double>(static_cast<std::size_t>(row[2])))
      throw input_error("interval_id must be a positive integer");
    c.points.push_back({row[0], row[1], static_cast<std::size_t>(row[2])});
  }
  c.mass = curve_mass(c);
  return c;
}

inline void write_eta_csv(std::ostream& out, const UnfoldedMap& um) {
  out << "u,x\n";
  for (std::size_t i = 0; i < um.knots_u.size(); ++i)
    out << format_double(um.knots_u[i]) << ',' << format_double(um.knots_x[i]) << '\n';
}

inline UnfoldedMap read_eta_csv(std::istream& in) {
  UnfoldedMap um;
  for (const auto& row : read_csv(in, {"u", "x"})) {
    um.knots_u.push_back(row[0]);
    um.knots_x.push_back(row[1]);
  }
  if (um.knots_u.size() < 2) throw input_error("eta table needs at least two knots");
  um.S = um.knots_u.back();
  return um;
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_left,bin_right,height\n";
  for (std::size_t b = 0; b < h.bins(); ++b)
    out << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ','
        << format_double(h.heights[b]) << '\n';
}

/// Edges and heights only; raw counts are not part of the file format.
inline Histogram read_histogram_csv(std::istream& in) {
  Histogram h;
  for (const auto& row : read_csv(in, {"bin_left", "bin_right", "height"})) {
    if (!h.edges.empty() && row[0] != h.edges.back())
      throw input_error("histogram bins must be contiguous");
    if (h.edges.empty()) h.edges.push_back(row[0]);
    h.edges.push_back(row[1]);
    h.heights.push_back(row[2]);
  }
  if (h.heights.empty()) throw input_error("histogram has no bins");
  return h;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json to_json(const CriticalCounts& c) {
  return {{"interior_min", c.interior_min},
          {"interior_max", c.interior_max},
          {"regular", c.regular},
          {"endpoint_min", c.endpoint_min},
          {"endpoint_max", c.endpoint_max}};
}

inline json partition_json(const MonotonePartition& p, const LayerTable& t) {
  json classes = json::array();
  for (const auto& c : t.classifications) classes.push_back(to_json(c));
  return {{"k", p.branches()},
          {"ell", t.b.size() - 1},
          {"S", p.S},
          {"alphas", p.alphas},
          {"g_alphas", p.g_alphas},
          {"lambdas", p.lambdas},
          {"ms", p.ms},
          {"b", t.b},
          {"c", t.c},
          {"index_sets", t.index_sets},
          {"classifications", classes}};
}

/// Inverse of partition_json for the partition arrays and the layer table.
inline std::pair<MonotonePartition, LayerTable> partition_from_json(const json& j) {
  try {
    MonotonePartition p;
    p.alphas = j.at("alphas").get<std::vector<double>>();
    p.g_alphas = j.at("g_alphas").get<std::vector<double>>();
    p.lambdas = j.at("lambdas").get<std::vector<double>>();
    p.ms = j.at("ms").get<std::vector<double>>();
    p.S = j.at("S").get<double>();
    LayerTable t;
    t.b = j.at("b").get<std::vector<double>>();
    t.c = j.at("c").get<std::vector<double>>();
    t.index_sets = j.at("index_sets").get<std::vector<BranchSet>>();
    for (const auto& c : j.at("classifications")) {
      t.classifications.push_back({c.at("interior_min").get<int>(), c.at("interior_max").get<int>(),
                                   c.at("regular").get<int>(), c.at("endpoint_min").get<int>(),
                                   c.at("endpoint_max").get<int>()});
    }
    return {std::move(p), std::move(t)};
  } catch (const json::exception& e) {
    throw input_error(std::string("malformed partition JSON: ") + e.what());
  }
}

inline json intervals_json(const DensityCurve& c) {
  json arr = json::array();
  for (const auto& iv : c.intervals) arr.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"cells", iv.cells}});
  return arr;
}

/// Canonical one-line description of a map definition.
inline std::string describe(const MapDefinition& def) {
  std::ostringstream os;
  os << map_name(def) << " alpha=" << format_double(def.alpha) << " beta=" << format_double(def.beta);
  std::visit(
      [&os](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Logistic>) {
          os << " r=" << format_double(m.r) << " iterations=" << m.iterations;
        } else if constexpr (std::is_same_v<M, Oscillator>) {
          os << " k=" << format_double(m.k) << " amplitude=" << format_double(m.amplitude)
             << " omega=" << format_double(m.omega) << " t=" << format_double(m.t)
             << " phase_scale=" << format_double(m.phase_scale);
        } else if constexpr (std::is_same_v<M, Duffing> || std::is_same_v<M, Pendulum>) {
          os << " t_final=" << format_double(m.t_final) << " step=" << format_double(m.step);
        } else {
          for (std::size_t i = 0; i < m.xs.size(); ++i)
            os << ' ' << format_double(m.xs[i]) << ':' << format_double(m.ys[i]);
        }
      },
      def.kind);
  return os.str();
}

/// 64-bit FNV-1a of describe(def), as 16 hex digits.
inline std::string fingerprint(const MapDefinition& def) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : describe(def)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace fdf::io
