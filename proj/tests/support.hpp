#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fdf/fdf.hpp"

namespace fdf::test {

// Everything the structure stage produces for a closed-form g.
struct Structure {
  SampledMap map;
  MonotonePartition partition;
  LayerTable table;
  UnfoldedMap unfolded;
};

template <class Fn>
Structure structure_of(Fn g, double alpha, double beta, int n_div, bool refine = true) {
  Structure s;
  s.map = sample_function(g, alpha, beta, GridSpec{n_div});
  PartitionOptions opt;
  opt.refine_extrema = refine;
  s.partition = detect_extrema(s.map, opt, g);
  s.table = build_layer_table(s.partition);
  s.unfolded = build_unfolded(s.map, s.partition);
  return s;
}

inline MapDefinition table_map(std::vector<double> xs, std::vector<double> ys) {
  MapDefinition def;
  def.alpha = xs.front();
  def.beta = xs.back();
  def.kind = TableMap{std::move(xs), std::move(ys)};
  return def;
}

// Seven laps on [1, 21]; two of the maxima are nearly level.
inline double appendix_map(double x) {
  const double s = x - 7.0;
  return 0.5 * (0.08 * s * s - 4.0 * std::cos(s) + 5.0);
}

// C1 piecewise cubic through random knot values with random knot slopes.
class RandomCubic {
 public:
  RandomCubic(std::uint64_t seed, int pieces) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> slope(-4.0, 4.0);
    std::uniform_real_distribution<double> gap(0.5, 1.5);
    double x = 0.0;
    for (int i = 0; i <= pieces; ++i) {
      xs_.push_back(x);
      ys_.push_back(val(rng));
      ds_.push_back(slope(rng));
      x += gap(rng);
    }
    const double end = xs_.back();
    for (double& k : xs_) k /= end;
    for (double& d : ds_) d *= end;
  }

  double operator()(double x) const {
    std::size_t i = 0;
    while (i + 2 < xs_.size() && x > xs_[i + 1]) ++i;
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * h * ds_[i] +
           (-2 * t3 + 3 * t2) * ys_[i + 1] + (t3 - t2) * h * ds_[i + 1];
  }

 private:
  std::vector<double> xs_, ys_, ds_;
};

}  // namespace fdf::test
