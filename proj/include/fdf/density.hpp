#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fdf/error.hpp"
#include "fdf/maps.hpp"
#include "fdf/parallel.hpp"
#include "fdf/partition.hpp"
#include "fdf/quadrature.hpp"
#include "fdf/unfold.hpp"

namespace fdf {

// ---------------------------------------------------------------------------
// Input densities
// ---------------------------------------------------------------------------

/// Unnormalised sin(omega x) + 2.
struct SinPlusTwo {
  double omega = 5.0;
};

struct Uniform {};

/// Nonnegative weights at increasing abscissae, linearly interpolated.
struct TableDensity {
  std::vector<double> xs;
  std::vector<double> weights;
};

using DensityKind = std::variant<SinPlusTwo, Uniform, TableDensity>;

inline constexpr std::size_t kNormalizationPanels = 2048;

/// A probability density on [alpha, beta], normalised by composite Simpson
/// quadrature at construction.
class DensitySpec {
 public:
  DensitySpec(DensityKind kind, double alpha, double beta)
      : kind_(std::move(kind)), alpha_(alpha), beta_(beta) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !(alpha < beta))
      throw input_error("density domain requires finite alpha < beta");
    if (const auto* t = std::get_if<TableDensity>(&kind_)) {
      if (t->xs.size() < 2 || t->xs.size() != t->weights.size())
        throw input_error("table density needs at least two (x, weight) rows");
      for (std::size_t i = 1; i < t->xs.size(); ++i)
        if (!(t->xs[i] > t->xs[i - 1]))
          throw input_error("table density x values must be strictly increasing");
      for (double w : t->weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw input_error("table density weights must be >= 0");
      if (t->xs.front() > alpha || t->xs.back() < beta)
        throw input_error("table density must span [alpha, beta]");
    }
    z_ = simpson([this](double x) { return unnormalized(x); }, alpha_, beta_,
                 kNormalizationPanels);
    if (!(z_ > 0.0)) throw degenerate_error("density normalisation constant is not positive");
  }

  [[nodiscard]] double unnormalized(double x) const {
    return std::visit(
        [x](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, SinPlusTwo>) {
            return std::sin(d.omega * x) + 2.0;
          } else if constexpr (std::is_same_v<D, Uniform>) {
            return 1.0;
          } else {
            const auto it = std::upper_bound(d.xs.begin(), d.xs.end(), x);
            const auto hi = static_cast<std::size_t>(it - d.xs.begin());
            if (hi == 0) return d.weights.front();
            if (hi == d.xs.size()) return d.weights.back();
            const double w = (x - d.xs[hi - 1]) / (d.xs[hi] - d.xs[hi - 1]);
            return d.weights[hi - 1] + w * (d.weights[hi] - d.weights[hi - 1]);
          }
        },
        kind_);
  }

  /// mu_X(x); zero outside [alpha, beta].
  [[nodiscard]] double operator()(double x) const {
    if (x < alpha_ || x > beta_) return 0.0;
    return unnormalized(x) / z_;
  }

  [[nodiscard]] double normalization() const noexcept { return z_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] const DensityKind& kind() const noexcept { return kind_; }

 private:
  DensityKind kind_;
  double alpha_;
  double beta_;
  double z_ = 0.0;
};

inline DensitySpec build_density_spec(DensityKind kind, double alpha, double beta) {
  return DensitySpec(std::move(kind), alpha, beta);
}

// ---------------------------------------------------------------------------
// Pushforward density
// ---------------------------------------------------------------------------

struct CurvePoint {
  double y = 0.0;
  double mu = 0.0;
  std::size_t interval = 0;  // 1-based, as in LayerTable
};

/// Cell layout of one interval (b_{i-1}, b_i).
struct CurveInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t cells = 0;

  [[nodiscard]] double cell_width() const { return (hi - lo) / static_cast<double>(cells); }
};

struct DensityCurve {
  std::vector<CurvePoint> points;
  std::vector<CurveInterval> intervals;
  double delta = 0.0;
  double mass = 0.0;
};

enum class JacobianSource {
  interpolant,  // slope of the piecewise-linear eta
  analytic,     // 1 / |g'(eta(u))| from a closed-form derivative
};

struct FdfOptions {
  JacobianSource jacobian = JacobianSource::interpolant;
  /// Required when jacobian == analytic.
  std::function<double(double)> derivative;
  unsigned threads = 1;
};

inline constexpr std::size_t kDefaultDeltaCells = 500;

/// Step size giving roughly `cells` cells across [g_min, g_max].
inline double default_delta(const LayerTable& table, std::size_t cells = kDefaultDeltaCells) {
  if (cells == 0) throw input_error("delta cell count must be positive");
  return (table.b.back() - table.b.front()) / static_cast<double>(cells);
}

/// Integral of the curve: on each interval the trapezoid rule over the cell
/// midpoints, with the first and last values held flat out to the interval
/// ends. On equal cells this is sum(mu) * cell width.
inline double curve_mass(const DensityCurve& curve) {
  double mass = 0.0;
  if (!curve.intervals.empty()) {
    for (const auto& pt : curve.points) {
      if (pt.interval < 1 || pt.interval > curve.intervals.size())
        throw input_error("curve point refers to an unknown interval");
      mass += pt.mu * curve.intervals[pt.interval - 1].cell_width();
    }
    return mass;
  }
  // Without interval metadata the cell width is recovered from the spacing.
  std::size_t start = 0;
  while (start < curve.points.size()) {
    std::size_t end = start;
    double sum = 0.0;
    while (end < curve.points.size() && curve.points[end].interval == curve.points[start].interval)
      sum += curve.points[end++].mu;
    const std::size_t n = end - start;
    if (n >= 2) {
      const double width = (curve.points[end - 1].y - curve.points[start].y) / static_cast<double>(n - 1);
      mass += sum * width;
    }
    start = end;
  }
  return mass;
}

/// mu_Y(y) = sum over j in I(y) of mu_X(eta(u_j(y))) eta'(u_j(y)), evaluated at
/// the cell midpoints of each interval between consecutive critical values.
/// Interval i gets ceil(len_i / delta) equal cells, so critical values are
/// never sampled.
inline DensityCurve fdf_density(const MonotonePartition& p, const LayerTable& table,
                                const UnfoldedMap& um, const DensitySpec& spec, double delta,
                                const FdfOptions& opt = {}) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw input_error("delta must be positive");
  if (opt.jacobian == JacobianSource::analytic && !opt.derivative)
    throw input_error("analytic Jacobian requested without a derivative");

  const std::size_t ell = table.intervals();
  std::vector<std::vector<CurvePoint>> per_interval(ell);
  DensityCurve curve;
  curve.delta = delta;
  curve.intervals.resize(ell);

  parallel_for(ell, opt.threads, [&](std::size_t idx) {
    const double lo = table.b[idx];
    const double hi = table.b[idx + 1];
    if (!(hi > lo)) throw numerical_error("empty interval between critical values");
    const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / delta)));
    curve.intervals[idx] = {lo, hi, cells};
    const double width = (hi - lo) / static_cast<double>(cells);
    const BranchSet& branches = table.index_sets[idx];

    auto& out = per_interval[idx];
    out.reserve(cells);
    for (std::size_t q = 0; q < cells; ++q) {
      const double y = lo + (static_cast<double>(q) + 0.5) * width;
      double mu = 0.0;
      for (std::size_t j : branches) {
        const double lambda = p.lambdas[j - 1];
        double u = p.ms[j - 1] + (y - p.g_alphas[j - 1]) * detail::sign_of(lambda);
        u = std::clamp(u, p.ms[j - 1], p.ms[j]);
        const double x = eta_eval(um, u);
        double jac = 0.0;
        if (opt.jacobian == JacobianSource::interpolant) {
          jac = eta_derivative(um, u);
        } else {
          const double slope = std::abs(opt.derivative(x));
          jac = slope > 0.0 ? 1.0 / slope : eta_derivative(um, u);
        }
        mu += spec(x) * jac;
      }
      out.push_back({y, mu, idx + 1});
    }
  });

  for (auto& pts : per_interval) curve.points.insert(curve.points.end(), pts.begin(), pts.end());
  curve.mass = curve_mass(curve);
  return curve;
}

}  // namespace fdf
