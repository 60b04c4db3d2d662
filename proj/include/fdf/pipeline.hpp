#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <utility>

#include "fdf/density.hpp"
#include "fdf/maps.hpp"
#include "fdf/oracle.hpp"
#include "fdf/partition.hpp"
#include "fdf/unfold.hpp"

namespace fdf {

struct PipelineOptions {
  GridSpec grid;
  PartitionOptions partition;
  double b_tol = 1e-9;
  std::size_t delta_cells = kDefaultDeltaCells;
  JacobianSource jacobian = JacobianSource::interpolant;
  unsigned threads = 1;
};

/// Wall time of each stage in seconds.
struct StageTimings {
  double sample = 0.0;
  double partition = 0.0;
  double unfold = 0.0;
  double density = 0.0;

  [[nodiscard]] double total() const noexcept { return sample + partition + unfold + density; }
};

struct FdfResult {
  SampledMap map;
  MonotonePartition partition;
  LayerTable table;
  UnfoldedMap unfolded;
  std::optional<DensityCurve> curve;
  StageTimings timings;
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Sampling, partition, layer table and unfolded map; no density.
inline FdfResult run_structure(const MapDefinition& def, const PipelineOptions& opt) {
  FdfResult r;
  detail::Stopwatch clock;
  r.map = sample_map(def, opt.grid, opt.threads);
  r.timings.sample = clock.lap();
  r.partition = detect_extrema(r.map, opt.partition,
                               [&def](double x) { return detail::eval_unchecked(def, x); });
  r.table = build_layer_table(r.partition, opt.b_tol);
  r.timings.partition = clock.lap();
  r.unfolded = build_unfolded(r.map, r.partition);
  r.timings.unfold = clock.lap();
  return r;
}

/// The full FDF pipeline for one map at one fixed time.
inline FdfResult run_fdf(const MapDefinition& def, const DensitySpec& spec,
                         const PipelineOptions& opt) {
  FdfResult r = run_structure(def, opt);
  detail::Stopwatch clock;
  FdfOptions fo;
  fo.jacobian = opt.jacobian;
  fo.threads = opt.threads;
  if (opt.jacobian == JacobianSource::analytic) {
    if (!map_derivative(def, def.alpha)) throw input_error("analytic Jacobian needs a closed-form map");
    fo.derivative = [&def](double x) { return *map_derivative(def, x); };
  }
  r.curve = fdf_density(r.partition, r.table, r.unfolded, spec,
                        default_delta(r.table, opt.delta_cells), fo);
  r.timings.density = clock.lap();
  return r;
}

}  // namespace fdf
