#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "fdf/error.hpp"
#include "fdf/maps.hpp"

namespace fdf {

/// Branch indices j are 1-based throughout: branch j is the lap
/// [alphas[j-1], alphas[j]] with increment lambdas[j-1].
using BranchSet = std::vector<std::size_t>;

struct PartitionOptions {
  /// Laps with |lambda| below merge_tol * (g_max - g_min) are fused away.
  double merge_tol = 1e-9;
  /// Polish each detected extremum inside its grid bracket. Only used by the
  /// overload that receives an evaluator for g.
  bool refine_extrema = true;
};

struct MonotonePartition {
  std::vector<double> alphas;
  std::vector<double> g_alphas;
  std::vector<double> lambdas;
  std::vector<double> ms;
  /// Grid index that flagged each alpha (0 and n_div for the endpoints).
  std::vector<std::size_t> grid_index;
  double S = 0.0;
  /// Absolute tolerance used for value comparisons against g(alpha_j).
  double value_tol = 0.0;

  [[nodiscard]] std::size_t branches() const noexcept { return lambdas.size(); }
  [[nodiscard]] double g_min() const { return *std::min_element(g_alphas.begin(), g_alphas.end()); }
  [[nodiscard]] double g_max() const { return *std::max_element(g_alphas.begin(), g_alphas.end()); }
};

namespace detail {

inline double sign_of(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Grid indices left after collapsing runs of three or more equal samples to
// their first and last members.
inline std::vector<std::size_t> drop_plateau_interiors(const std::vector<double>& ys) {
  std::vector<std::size_t> kept;
  kept.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const bool interior = i > 0 && i + 1 < ys.size();
    if (interior && ys[i] == ys[i - 1] && ys[i] == ys[i + 1]) continue;
    kept.push_back(i);
  }
  return kept;
}

// Removes points that are not extrema and fuses laps shorter than tol until
// the lap increments strictly alternate in sign.
inline void fuse_laps(std::vector<std::size_t>& pts, const std::vector<double>& ys, double tol) {
  auto lambda = [&](std::size_t j) { return ys[pts[j]] - ys[pts[j - 1]]; };
  for (;;) {
    bool changed = false;
    for (std::size_t j = 1; j + 1 < pts.size(); ++j) {
      const double a = lambda(j);
      const double b = lambda(j + 1);
      if (a != 0.0 && b != 0.0 && sign_of(a) == sign_of(b)) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
    if (changed) continue;

    for (std::size_t j = 1; j < pts.size(); ++j) {
      if (std::abs(lambda(j)) > tol) continue;
      const std::size_t k = pts.size() - 1;
      if (k == 1) throw degenerate_error("map has no monotone lap above the merge tolerance");
      if (j == 1) {
        pts.erase(pts.begin() + 1);
      } else if (j == k) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(k - 1));
      } else {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(j - 1),
                  pts.begin() + static_cast<std::ptrdiff_t>(j + 1));
      }
      changed = true;
      break;
    }
    if (!changed) return;
  }
}

inline void finish_partition(MonotonePartition& p) {
  const std::size_t k = p.alphas.size() - 1;
  p.lambdas.resize(k);
  p.ms.assign(k + 1, 0.0);
  for (std::size_t j = 1; j <= k; ++j) {
    p.lambdas[j - 1] = p.g_alphas[j] - p.g_alphas[j - 1];
    p.ms[j] = p.ms[j - 1] + std::abs(p.lambdas[j - 1]);
  }
  p.S = p.ms[k];
}

// Grid-level partition, before any refinement. `kept` receives the
// plateau-filtered grid indices, which define each extremum's bracket.
inline MonotonePartition grid_partition(const SampledMap& map, const PartitionOptions& opt,
                                        std::vector<std::size_t>& kept) {
  if (map.size() < 5) throw input_error("extremum detection needs n_div >= 4");
  const auto& ys = map.ys;
  const double range = map.g_max - map.g_min;
  if (!(range > 0.0)) throw degenerate_error("map is constant on the sampling grid");

  kept = drop_plateau_interiors(ys);
  std::vector<std::size_t> pts{kept.front()};
  bool prev_flagged = false;
  for (std::size_t p = 1; p + 1 < kept.size(); ++p) {
    const double d_prev = ys[kept[p]] - ys[kept[p - 1]];
    const double d_next = ys[kept[p + 1]] - ys[kept[p]];
    bool flag = d_prev * d_next <= 0.0;
    // A flat pair flags both of its members; the earlier one wins.
    if (flag && prev_flagged && d_prev == 0.0) flag = false;
    if (flag) pts.push_back(kept[p]);
    prev_flagged = flag;
  }
  pts.push_back(kept.back());

  const double tol = opt.merge_tol * range;
  fuse_laps(pts, ys, tol);

  MonotonePartition out;
  out.value_tol = tol;
  out.grid_index = pts;
  for (std::size_t i : pts) {
    out.alphas.push_back(map.xs[i]);
    out.g_alphas.push_back(ys[i]);
  }
  finish_partition(out);
  return out;
}

}  // namespace detail

/// Piecewise-monotone structure of a sampled map. Each interior alpha_j is the
/// grid point x_i flagged by the discrete sign test
/// (g(x_i) - g(x_{i-1})) (g(x_{i+1}) - g(x_i)) <= 0.
inline MonotonePartition detect_extrema(const SampledMap& map, const PartitionOptions& opt = {}) {
  std::vector<std::size_t> kept;
  return detail::grid_partition(map, opt, kept);
}

/// As above, then moves each interior extremum to the optimum of g inside its
/// grid bracket when that strictly improves on the grid value. Brackets of
/// neighbouring extrema are split at their midpoint so the order is preserved.
template <class Eval>
MonotonePartition detect_extrema(const SampledMap& map, const PartitionOptions& opt, Eval&& g) {
  std::vector<std::size_t> kept;
  MonotonePartition p = detail::grid_partition(map, opt, kept);
  if (!opt.refine_extrema || p.alphas.size() < 3) return p;

  const auto& xs = map.xs;
  const std::size_t k = p.alphas.size() - 1;
  for (std::size_t j = 1; j < k; ++j) {
    const std::size_t gi = p.grid_index[j];
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(kept.begin(), kept.end(), gi) - kept.begin());
    double lo = xs[kept[pos - 1]];
    double hi = xs[kept[pos + 1]];
    lo = std::max(lo, 0.5 * (xs[p.grid_index[j - 1]] + xs[gi]));
    hi = std::min(hi, 0.5 * (xs[gi] + xs[p.grid_index[j + 1]]));

    const double direction = p.lambdas[j - 1] > 0.0 ? -1.0 : 1.0;  // maximise or minimise
    double best_x = p.alphas[j];
    double best_score = direction * p.g_alphas[j];
    auto objective = [&](double x) {
      const double score = direction * g(x);
      if (score < best_score && x > lo && x < hi) {
        best_score = score;
        best_x = x;
      }
      return score;
    };
    std::uintmax_t iterations = 200;
    boost::math::tools::brent_find_minima(objective, lo, hi,
                                          std::numeric_limits<double>::digits, iterations);
    if (best_x != p.alphas[j]) {
      p.alphas[j] = best_x;
      p.g_alphas[j] = direction * best_score;
    }
  }
  detail::finish_partition(p);
  return p;
}

/// Strict membership of y in the open image of branch j (1-based).
inline bool layer_membership(double y, std::size_t j, const MonotonePartition& p) {
  if (j < 1 || j > p.branches()) throw branch_error("branch index out of range");
  const double lambda = p.lambdas[j - 1];
  const double t = (y - p.g_alphas[j - 1]) * detail::sign_of(lambda);
  return 0.0 < t && t < std::abs(lambda);
}

/// Closed membership, widened by `slack` on both ends.
inline bool layer_membership_closed(double y, std::size_t j, const MonotonePartition& p,
                                    double slack) {
  if (j < 1 || j > p.branches()) throw branch_error("branch index out of range");
  const double lambda = p.lambdas[j - 1];
  const double t = (y - p.g_alphas[j - 1]) * detail::sign_of(lambda);
  return -slack <= t && t <= std::abs(lambda) + slack;
}

/// Unfolded coordinate m_{j-1} + (y - g(alpha_{j-1})) sign(lambda_j).
inline double u_of_y(double y, std::size_t j, const MonotonePartition& p) {
  if (!layer_membership_closed(y, j, p, p.value_tol))
    throw branch_error("value " + std::to_string(y) + " is not in the image of branch " +
                       std::to_string(j));
  const double lambda = p.lambdas[j - 1];
  return p.ms[j - 1] + (y - p.g_alphas[j - 1]) * detail::sign_of(lambda);
}

// ---------------------------------------------------------------------------
// Critical values and index sets
// ---------------------------------------------------------------------------

/// Preimage classification of one critical value b_i: interior minima and
/// maxima, regular interior preimages, and endpoint minima and maxima.
struct CriticalCounts {
  int interior_min = 0;
  int interior_max = 0;
  int regular = 0;
  int endpoint_min = 0;
  int endpoint_max = 0;

  [[nodiscard]] int preimages() const noexcept {
    return interior_min + interior_max + regular + endpoint_min + endpoint_max;
  }
};

/// Interval i (1-based) is (b[i-1], b[i]); its midpoint and index set live at
/// c[i-1] and index_sets[i-1].
struct LayerTable {
  std::vector<double> b;
  std::vector<double> c;
  std::vector<BranchSet> index_sets;
  std::vector<CriticalCounts> classifications;
  double tol = 0.0;

  [[nodiscard]] std::size_t intervals() const noexcept { return c.size(); }
};

inline LayerTable build_layer_table(const MonotonePartition& p, double b_tol = 1e-9) {
  const std::size_t k = p.branches();
  if (k == 0) throw input_error("partition has no branches");

  LayerTable t;
  const double range = p.g_max() - p.g_min();
  t.tol = b_tol * range;

  // Cluster sorted images; each cluster is anchored at its smallest member.
  std::vector<std::size_t> order(p.g_alphas.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p.g_alphas[a] < p.g_alphas[b]; });

  std::vector<std::size_t> cluster_of(p.g_alphas.size());
  double anchor = p.g_alphas[order.front()];
  double last = anchor;
  t.b.push_back(anchor);
  for (std::size_t s = 0; s < order.size(); ++s) {
    const double v = p.g_alphas[order[s]];
    if (v - anchor > t.tol) {
      if (v - last <= t.tol)
        throw numerical_error("critical values chain across the dedup tolerance; table construction failed");
      anchor = v;
      t.b.push_back(v);
    }
    last = v;
    cluster_of[order[s]] = t.b.size() - 1;
  }
  t.b.back() = p.g_max();
  if (t.b.size() < 2) throw degenerate_error("map image collapses to a single critical value");

  for (std::size_t i = 1; i < t.b.size(); ++i) {
    const double c = 0.5 * (t.b[i - 1] + t.b[i]);
    t.c.push_back(c);
    BranchSet set;
    for (std::size_t j = 1; j <= k; ++j)
      if (layer_membership(c, j, p)) set.push_back(j);
    if (set.empty())
      throw numerical_error("empty index set on interval " + std::to_string(i));
    t.index_sets.push_back(std::move(set));
  }

  t.classifications.assign(t.b.size(), CriticalCounts{});
  for (std::size_t j = 0; j <= k; ++j) {
    auto& cls = t.classifications[cluster_of[j]];
    if (j == 0) {
      (p.lambdas.front() > 0.0 ? cls.endpoint_min : cls.endpoint_max) += 1;
    } else if (j == k) {
      (p.lambdas.back() > 0.0 ? cls.endpoint_max : cls.endpoint_min) += 1;
    } else if (p.lambdas[j - 1] < 0.0 && p.lambdas[j] > 0.0) {
      cls.interior_min += 1;
    } else {
      cls.interior_max += 1;
    }
  }
  for (std::size_t i = 0; i < t.b.size(); ++i) {
    for (std::size_t j = 1; j <= k; ++j) {
      const double lambda = p.lambdas[j - 1];
      const double s = (t.b[i] - p.g_alphas[j - 1]) * detail::sign_of(lambda);
      if (s > t.tol && s < std::abs(lambda) - t.tol) t.classifications[i].regular += 1;
    }
  }
  return t;
}

/// I(y). Between critical values this is the stored set of the enclosing
/// interval; at a critical value it is every branch whose closed image holds y.
inline BranchSet index_set(double y, const LayerTable& table, const MonotonePartition& p) {
  if (!(y >= table.b.front() - table.tol && y <= table.b.back() + table.tol))
    throw range_error("value " + std::to_string(y) + " outside [g_min, g_max]");
  for (double b : table.b) {
    if (std::abs(y - b) <= table.tol) {
      BranchSet set;
      for (std::size_t j = 1; j <= p.branches(); ++j)
        if (layer_membership_closed(b, j, p, table.tol)) set.push_back(j);
      return set;
    }
  }
  const auto it = std::upper_bound(table.b.begin(), table.b.end(), y);
  const auto interval = static_cast<std::size_t>(it - table.b.begin());
  return table.index_sets[interval - 1];
}

/// Checks the preimage counting rules at every critical value b_i. With
/// N_below and N_above the index-set sizes on either side (zero outside
/// [g_min, g_max]):
///   N_above = 2 #C_m + #R + #E_m,   N_below = 2 #C_M + #R + #E_M,
/// and hence the crossing rule
///   N_above = N_below + 2 #C_m - 2 #C_M + #E_m - #E_M.
inline bool transition_check(const LayerTable& table) {
  const std::size_t ell = table.b.size() - 1;
  if (table.index_sets.size() != ell || table.classifications.size() != ell + 1) return false;
  for (std::size_t i = 0; i <= ell; ++i) {
    const int below = i == 0 ? 0 : static_cast<int>(table.index_sets[i - 1].size());
    const int above = i == ell ? 0 : static_cast<int>(table.index_sets[i].size());
    const auto& n = table.classifications[i];
    if (above != 2 * n.interior_min + n.regular + n.endpoint_min) return false;
    if (below != 2 * n.interior_max + n.regular + n.endpoint_max) return false;
    if (above != below + 2 * n.interior_min - 2 * n.interior_max + n.endpoint_min - n.endpoint_max)
      return false;
    if (below != above - 2 * n.interior_min + 2 * n.interior_max - n.endpoint_min + n.endpoint_max)
      return false;
  }
  return true;
}

}  // namespace fdf
