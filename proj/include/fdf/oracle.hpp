#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fdf/density.hpp"
#include "fdf/error.hpp"
#include "fdf/maps.hpp"
#include "fdf/parallel.hpp"

namespace fdf {

struct McConfig {
  std::size_t n_samples = 1'000'000;
  std::size_t n_bins = 200;
  std::uint64_t seed = 1;
};

inline void validate(const McConfig& cfg) {
  if (cfg.n_bins < 2) throw input_error("Monte Carlo needs at least two bins");
  if (cfg.n_samples < cfg.n_bins) throw input_error("Monte Carlo needs n_samples >= n_bins");
}

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/// Samples are drawn in fixed-size chunks, each from its own engine seeded by
/// (seed, chunk index). The stream is therefore independent of thread count.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform deviate in [0, 1) built from the top 53 bits.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Inverse transform sampling from a numeric CDF: cumulative trapezoid of
/// mu_X on a 4096-point grid, inverted by linear interpolation.
class InverseCdfSampler {
 public:
  static constexpr std::size_t kGridPoints = 4096;

  explicit InverseCdfSampler(const DensitySpec& spec) : xs_(kGridPoints), cdf_(kGridPoints, 0.0) {
    const double h = (spec.beta() - spec.alpha()) / static_cast<double>(kGridPoints - 1);
    for (std::size_t i = 0; i < kGridPoints; ++i) xs_[i] = spec.alpha() + h * static_cast<double>(i);
    xs_.back() = spec.beta();
    double prev = spec(xs_[0]);
    for (std::size_t i = 1; i < kGridPoints; ++i) {
      const double cur = spec(xs_[i]);
      cdf_[i] = cdf_[i - 1] + 0.5 * (prev + cur) * (xs_[i] - xs_[i - 1]);
      prev = cur;
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw degenerate_error("density has zero mass on its grid");
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }

  /// x with F(x) = u, for u in [0, 1].
  [[nodiscard]] double quantile(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return xs_.front();
    if (it == cdf_.end()) return xs_.back();
    const auto hi = static_cast<std::size_t>(it - cdf_.begin());
    const std::size_t lo = hi - 1;
    const double w = (u - cdf_[lo]) / (cdf_[hi] - cdf_[lo]);
    return xs_[lo] + w * (xs_[hi] - xs_[lo]);
  }

  /// Numeric CDF, linear between grid points.
  [[nodiscard]] double cdf(double x) const {
    if (x <= xs_.front()) return 0.0;
    if (x >= xs_.back()) return 1.0;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto hi = static_cast<std::size_t>(it - xs_.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return cdf_[lo] + w * (cdf_[hi] - cdf_[lo]);
  }

  double operator()(std::mt19937_64& engine) const { return quantile(uniform01(engine)); }

 private:
  std::vector<double> xs_;
  std::vector<double> cdf_;
};

/// The first n samples of the stream for `seed`.
inline std::vector<double> draw_samples(const InverseCdfSampler& sampler, std::uint64_t seed,
                                        std::size_t n, unsigned threads = 1) {
  std::vector<double> out(n);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto engine = chunk_engine(seed, c);
    const std::size_t end = std::min(n, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) out[i] = sampler(engine);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Histogram estimate
// ---------------------------------------------------------------------------

struct Histogram {
  std::vector<double> edges;  // n_bins + 1 uniform edges over [lo, hi]
  std::vector<double> heights;
  std::vector<std::uint64_t> counts;
  std::size_t n_samples = 0;
  std::size_t clamped = 0;  // samples outside [lo, hi], counted in the end bins

  [[nodiscard]] std::size_t bins() const noexcept { return heights.size(); }
  [[nodiscard]] double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
  [[nodiscard]] double mass() const {
    double m = 0.0;
    for (std::size_t b = 0; b < bins(); ++b) m += heights[b] * width(b);
    return m;
  }
  [[nodiscard]] double clamped_fraction() const {
    return n_samples == 0 ? 0.0 : static_cast<double>(clamped) / static_cast<double>(n_samples);
  }
};

/// Pushes cfg.n_samples draws from mu_X through g and bins them uniformly over
/// [lo, hi]. Counts are merged by integer summation, so the result does not
/// depend on the thread count.
template <class Eval>
Histogram mc_histogram(Eval&& g, const DensitySpec& spec, const McConfig& cfg, double lo,
                       double hi, unsigned threads = 1) {
  validate(cfg);
  if (!(lo < hi)) throw input_error("histogram range requires lo < hi");
  const InverseCdfSampler sampler(spec);
  const std::size_t n_bins = cfg.n_bins;
  const std::size_t chunks = (cfg.n_samples + kChunkSize - 1) / kChunkSize;
  std::vector<std::vector<std::uint64_t>> chunk_counts(chunks);
  std::vector<std::size_t> chunk_clamped(chunks, 0);
  const double scale = static_cast<double>(n_bins) / (hi - lo);

  parallel_for(chunks, threads, [&](std::size_t c) {
    auto engine = chunk_engine(cfg.seed, c);
    auto& counts = chunk_counts[c];
    counts.assign(n_bins, 0);
    const std::size_t end = std::min(cfg.n_samples, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      const double x = sampler(engine);
      double y = 0.0;
      try {
        y = g(x);
      } catch (const divergence_error& e) {
        throw divergence_error(std::string(e.what()) + " (sample x = " + std::to_string(x) + ")",
                               e.time);
      }
      if (!std::isfinite(y)) throw numerical_error("non-finite image for sample x = " + std::to_string(x));
      if (y < lo || y > hi) ++chunk_clamped[c];
      const double pos = std::floor((y - lo) * scale);
      const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n_bins - 1)));
      ++counts[bin];
    }
  });

  Histogram h;
  h.n_samples = cfg.n_samples;
  h.counts.assign(n_bins, 0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t b = 0; b < n_bins; ++b) h.counts[b] += chunk_counts[c][b];
    h.clamped += chunk_clamped[c];
  }
  h.edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b)
    h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins);
  h.edges.back() = hi;
  h.heights.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b)
    h.heights[b] = static_cast<double>(h.counts[b]) / (static_cast<double>(cfg.n_samples) * h.width(b));
  return h;
}

/// Brute-force density of g(X) over an explicit range.
inline Histogram mc_density(const MapDefinition& def, const DensitySpec& spec, const McConfig& cfg,
                            double lo, double hi, unsigned threads = 1) {
  validate(def);
  return mc_histogram([&def](double x) { return eval_map(def, x); }, spec, cfg, lo, hi, threads);
}

/// Brute-force density of g(X), binned over the range found by a preliminary
/// scan of g on an n_div grid.
inline Histogram mc_density(const MapDefinition& def, const DensitySpec& spec, const McConfig& cfg,
                            GridSpec scan = {}, unsigned threads = 1) {
  const SampledMap sm = sample_map(def, scan, threads);
  if (!(sm.g_max > sm.g_min)) throw degenerate_error("map is constant on the scan grid");
  return mc_density(def, spec, cfg, sm.g_min, sm.g_max, threads);
}

// ---------------------------------------------------------------------------
// Curve against histogram
// ---------------------------------------------------------------------------

struct CompareMetrics {
  double l1 = 0.0;
  double sup = 0.0;
};

/// l1 = sum |curve average on bin - height| * width and sup = max |...|. The
/// curve average uses the curve points inside the bin, or the point nearest
/// the bin centre when none fall inside.
inline CompareMetrics compare(const DensityCurve& curve, const Histogram& hist) {
  if (curve.points.empty() || hist.bins() == 0) throw input_error("cannot compare empty estimates");
  std::vector<double> ys(curve.points.size());
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = curve.points[i].y;
  if (!std::is_sorted(ys.begin(), ys.end())) throw input_error("curve points must be sorted by y");
  if (ys.back() < hist.edges.front() || ys.front() > hist.edges.back())
    throw input_error("curve and histogram supports are disjoint");

  CompareMetrics m;
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    const double left = hist.edges[b];
    const double right = hist.edges[b + 1];
    const bool last = b + 1 == hist.bins();
    auto first = std::lower_bound(ys.begin(), ys.end(), left);
    auto past = last ? std::upper_bound(ys.begin(), ys.end(), right)
                     : std::lower_bound(ys.begin(), ys.end(), right);
    double value = 0.0;
    if (first != past) {
      double sum = 0.0;
      for (auto it = first; it != past; ++it)
        sum += curve.points[static_cast<std::size_t>(it - ys.begin())].mu;
      value = sum / static_cast<double>(past - first);
    } else {
      const double centre = 0.5 * (left + right);
      auto it = std::lower_bound(ys.begin(), ys.end(), centre);
      std::size_t idx = static_cast<std::size_t>(it - ys.begin());
      if (idx == ys.size() || (idx > 0 && centre - ys[idx - 1] <= ys[idx] - centre)) --idx;
      value = curve.points[idx].mu;
    }
    const double diff = std::abs(value - hist.heights[b]);
    m.l1 += diff * (right - left);
    m.sup = std::max(m.sup, diff);
  }
  return m;
}

}  // namespace fdf
