#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "fdf/fdf.hpp"
#include "support.hpp"

using namespace fdf;

namespace {

McConfig mc(std::size_t n, std::size_t bins, std::uint64_t seed = 1) {
  McConfig c;
  c.n_samples = n;
  c.n_bins = bins;
  c.seed = seed;
  return c;
}

// Closed-form CDF of (sin 5x + 2) / Z on [0, 1].
double sin_cdf(double x) {
  const double z = 2.0 + (1.0 - std::cos(5.0)) / 5.0;
  return (2.0 * x + (1.0 - std::cos(5.0 * x)) / 5.0) / z;
}

}  // namespace

TEST(Sampler, UniformQuantileIsLinear) {
  const InverseCdfSampler s(build_density_spec(Uniform{}, -1, 1));
  EXPECT_EQ(s.quantile(0.0), -1.0);
  EXPECT_EQ(s.quantile(1.0), 1.0);
  for (double u : {0.1, 0.25, 0.5, 0.9}) EXPECT_NEAR(s.quantile(u), -1.0 + 2.0 * u, 1e-12);
}

TEST(Sampler, QuantileInvertsCdf) {
  const InverseCdfSampler s(build_density_spec(SinPlusTwo{5.0}, 0, 5));
  for (int i = 1; i < 100; ++i) {
    const double u = i / 100.0;
    EXPECT_NEAR(s.cdf(s.quantile(u)), u, 1e-12);
  }
}

TEST(Sampler, KolmogorovSmirnov) {
  const auto spec = build_density_spec(SinPlusTwo{5.0}, 0, 1);
  const std::size_t n = 100000;
  auto xs = draw_samples(InverseCdfSampler(spec), 99, n, 2);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = sin_cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(Sampler, StreamIndependentOfCountAndThreads) {
  const InverseCdfSampler s(build_density_spec(Uniform{}, 0, 1));
  const auto a = draw_samples(s, 5, 200000, 1);
  const auto b = draw_samples(s, 5, 150000, 3);
  EXPECT_TRUE(std::equal(b.begin(), b.end(), a.begin()));
  for (double u : a) {
    ASSERT_GE(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Uniform01, HalfOpenUnitInterval) {
  auto e = chunk_engine(3, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(e);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(McHistogram, IdentityIsFlat) {
  const auto def = test::table_map({0, 1}, {0, 1});
  const auto h = mc_density(def, build_density_spec(Uniform{}, 0, 1), mc(100000, 20), 0.0, 1.0);
  for (double height : h.heights) EXPECT_NEAR(height, 1.0, 0.05);
  EXPECT_EQ(h.clamped, 0u);
}

TEST(McHistogram, ParabolaAgainstExactBinAverages) {
  // Bin average of 1/(2 sqrt y) over [a, b] is (sqrt b - sqrt a) / (b - a).
  const auto h = mc_histogram([](double x) { return x * x; }, build_density_spec(Uniform{}, -1, 1),
                              mc(200000, 200, 11), 0.0, 1.0);
  double l1 = 0.0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const double lo = h.edges[b], hi = h.edges[b + 1];
    const double exact = (std::sqrt(hi) - std::sqrt(lo)) / (hi - lo);
    l1 += std::abs(h.heights[b] - exact) * h.width(b);
  }
  EXPECT_LT(l1, 0.05);
}

TEST(McHistogram, MassIsOneEvenWhenClamped) {
  const auto spec = build_density_spec(Uniform{}, -1, 1);
  const auto g = [](double x) { return x * x; };
  const auto full = mc_histogram(g, spec, mc(50000, 50), 0.0, 1.0);
  EXPECT_NEAR(full.mass(), 1.0, 1e-12);
  const auto narrow = mc_histogram(g, spec, mc(50000, 50), 0.2, 0.8);
  EXPECT_NEAR(narrow.mass(), 1.0, 1e-12);
  EXPECT_GT(narrow.clamped_fraction(), 0.3);
  std::uint64_t total = 0;
  for (auto c : narrow.counts) total += c;
  EXPECT_EQ(total, 50000u);
}

TEST(McHistogram, SeedDeterminism) {
  const auto cfg = load_config(std::string(FDF_CONFIG_DIR) + "/logistic3.cfg");
  const auto spec = cfg.density_spec();
  const auto a = mc_density(cfg.map, spec, mc(200000, 200, 42), cfg.grid, 1);
  const auto b = mc_density(cfg.map, spec, mc(200000, 200, 42), cfg.grid, 4);
  const auto c = mc_density(cfg.map, spec, mc(200000, 200, 43), cfg.grid, 1);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.heights, b.heights);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_NE(a.counts, c.counts);
}

TEST(McHistogram, DivergenceNamesSample) {
  const auto spec = build_density_spec(Uniform{}, 0, 1);
  const auto boom = [](double) -> double { throw divergence_error("blew up", 1.5); };
  try {
    mc_histogram(boom, spec, mc(100, 10), 0.0, 1.0);
    FAIL() << "expected divergence";
  } catch (const divergence_error& e) {
    EXPECT_NE(std::string(e.what()).find("sample x ="), std::string::npos);
    EXPECT_EQ(e.time, 1.5);
  }
}

TEST(McHistogram, RejectsBadConfig) {
  const auto spec = build_density_spec(Uniform{}, 0, 1);
  const auto g = [](double x) { return x; };
  EXPECT_THROW(mc_histogram(g, spec, mc(100, 1), 0.0, 1.0), input_error);
  EXPECT_THROW(mc_histogram(g, spec, mc(10, 20), 0.0, 1.0), input_error);
  EXPECT_THROW(mc_histogram(g, spec, mc(100, 10), 1.0, 1.0), input_error);
}

TEST(Compare, IdenticalEstimatesGiveZero) {
  const auto spec = build_density_spec(Uniform{}, -1, 1);
  const auto h = mc_histogram([](double x) { return x * x; }, spec, mc(20000, 40), 0.0, 1.0);
  DensityCurve c;
  for (std::size_t b = 0; b < h.bins(); ++b)
    c.points.push_back({0.5 * (h.edges[b] + h.edges[b + 1]), h.heights[b], 1});
  const auto m = compare(c, h);
  EXPECT_EQ(m.l1, 0.0);
  EXPECT_EQ(m.sup, 0.0);
}

TEST(Compare, ConstantOffset) {
  Histogram h;
  h.edges = {0.0, 0.5, 1.0};
  h.heights = {1.0, 1.0};
  DensityCurve c;
  for (double y : {0.1, 0.2, 0.6, 0.9}) c.points.push_back({y, 1.25, 1});
  const auto m = compare(c, h);
  EXPECT_DOUBLE_EQ(m.l1, 0.25);
  EXPECT_DOUBLE_EQ(m.sup, 0.25);
}

TEST(Compare, RejectsUnusableInput) {
  Histogram h;
  h.edges = {0.0, 1.0};
  h.heights = {1.0};
  DensityCurve empty;
  EXPECT_THROW(compare(empty, h), input_error);
  DensityCurve far;
  far.points.push_back({5.0, 1.0, 1});
  EXPECT_THROW(compare(far, h), input_error);
}
