#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fdf/error.hpp"
#include "fdf/maps.hpp"
#include "fdf/partition.hpp"

namespace fdf {

/// Knots (x_i, u_i = g_hat(x_i)) of the unfolded map. Read the other way round
/// they define eta, the piecewise-linear inverse of g_hat on [0, S].
struct UnfoldedMap {
  std::vector<double> knots_u;
  std::vector<double> knots_x;
  double S = 0.0;
  /// g_hat(alpha_j) at interior partition points, where eta' blows up in the
  /// continuum limit.
  std::vector<double> crease_us;

  [[nodiscard]] double alpha() const { return knots_x.front(); }
  [[nodiscard]] double beta() const { return knots_x.back(); }
};

/// g_hat(x) = m_{j-1} + |g(x) - g(alpha_{j-1})| on [alpha_{j-1}, alpha_j],
/// evaluated at every grid point plus any refined alpha_j that is off-grid.
/// Samples that repeat the previous knot's u (flat pairs) are skipped.
inline UnfoldedMap build_unfolded(const SampledMap& map, const MonotonePartition& p) {
  const std::size_t k = p.branches();
  if (k == 0 || p.alphas.front() != map.xs.front() || p.alphas.back() != map.xs.back())
    throw input_error("partition does not belong to this sampled map");

  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(map.size() + k);
  ys.reserve(map.size() + k);
  std::size_t next_alpha = 1;
  for (std::size_t i = 0; i < map.size(); ++i) {
    while (next_alpha < k && p.alphas[next_alpha] <= map.xs[i]) {
      if (p.alphas[next_alpha] < map.xs[i]) {
        xs.push_back(p.alphas[next_alpha]);
        ys.push_back(p.g_alphas[next_alpha]);
      }
      ++next_alpha;
    }
    xs.push_back(map.xs[i]);
    ys.push_back(map.ys[i]);
  }

  UnfoldedMap um;
  um.S = p.S;
  um.knots_x.reserve(xs.size());
  um.knots_u.reserve(xs.size());
  std::size_t j = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (j < k && xs[i] > p.alphas[j]) ++j;
    double u = p.ms[j - 1] + std::abs(ys[i] - p.g_alphas[j - 1]);
    if (xs[i] == p.alphas[j]) u = p.ms[j];
    if (!um.knots_u.empty()) {
      if (u == um.knots_u.back()) continue;
      if (u < um.knots_u.back())
        throw numerical_error("unfolded map is not increasing near x = " + std::to_string(xs[i]));
    }
    um.knots_x.push_back(xs[i]);
    um.knots_u.push_back(u);
  }
  if (um.knots_u.size() < 2) throw degenerate_error("unfolded map has fewer than two knots");
  if (std::abs(um.knots_u.back() - um.S) > 1e-12 * um.S)
    throw numerical_error("unfolded map does not end at S");
  // The last sample may have been skipped as a flat repeat of the previous one.
  um.knots_x.back() = map.xs.back();

  for (std::size_t a = 1; a < k; ++a) um.crease_us.push_back(p.ms[a]);
  return um;
}

namespace detail {

// Segment [s, s+1] bracketing u; a knot resolves to the segment on its right,
// and u = S to the last segment.
inline std::size_t eta_segment(const UnfoldedMap& um, double u) {
  const double slack = 1e-12 * um.S;
  if (!(u >= -slack && u <= um.S + slack))
    throw range_error("unfolded coordinate " + std::to_string(u) + " outside [0, S]");
  const auto& us = um.knots_u;
  const auto it = std::upper_bound(us.begin(), us.end(), u);
  std::size_t hi = static_cast<std::size_t>(it - us.begin());
  hi = std::clamp<std::size_t>(hi, 1, us.size() - 1);
  return hi - 1;
}

}  // namespace detail

inline double eta_eval(const UnfoldedMap& um, double u) {
  const std::size_t s = detail::eta_segment(um, u);
  if (u <= um.knots_u.front()) return um.knots_x.front();
  if (u >= um.knots_u.back()) return um.knots_x.back();
  const double du = um.knots_u[s + 1] - um.knots_u[s];
  const double w = (u - um.knots_u[s]) / du;
  return um.knots_x[s] + w * (um.knots_x[s + 1] - um.knots_x[s]);
}

/// dx/du of the bracketing segment.
inline double eta_derivative(const UnfoldedMap& um, double u) {
  const std::size_t s = detail::eta_segment(um, u);
  const double du = um.knots_u[s + 1] - um.knots_u[s];
  if (!(du > 0.0)) throw numerical_error("zero-length segment in the unfolded map");
  return (um.knots_x[s + 1] - um.knots_x[s]) / du;
}

}  // namespace fdf
