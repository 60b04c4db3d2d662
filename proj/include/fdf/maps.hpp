#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fdf/error.hpp"
#include "fdf/parallel.hpp"

namespace fdf {

// ---------------------------------------------------------------------------
// Map definitions
// ---------------------------------------------------------------------------

/// k-fold iterate of the logistic map L(x) = r x (1 - x).
struct Logistic {
  double r = 3.9;
  int iterations = 1;
};

/// g(x) = k x + A cos(omega t + s x). The phase scale s is 1 for the plain
/// oscillator; other values shift the phase frequency of the initial phase.
struct Oscillator {
  double k = 1.0;
  double amplitude = 0.0;
  double omega = 1.0;
  double t = 0.0;
  double phase_scale = 1.0;
};

/// Position at t_final of y'' = -4 y^3 with y(0) = 0, v(0) = x.
struct Duffing {
  double t_final = 5.0;
  double step = 5.0 / 300.0;
};

/// Position at t_final of y'' = -sin(y) with y(0) = 0, v(0) = x.
struct Pendulum {
  double t_final = 18.0;
  double step = 18.0 / 200.0;
};

/// Externally computed samples, linearly interpolated.
struct TableMap {
  std::vector<double> xs;
  std::vector<double> ys;
};

using MapKind = std::variant<Logistic, Oscillator, Duffing, Pendulum, TableMap>;

struct MapDefinition {
  MapKind kind;
  double alpha = 0.0;
  double beta = 1.0;
};

inline std::string map_name(const MapDefinition& def) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Logistic>) return "logistic";
        else if constexpr (std::is_same_v<M, Oscillator>) return "oscillator";
        else if constexpr (std::is_same_v<M, Duffing>) return "duffing";
        else if constexpr (std::is_same_v<M, Pendulum>) return "pendulum";
        else return "table";
      },
      def.kind);
}

namespace detail {

inline void require_ode_params(double t_final, double step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw input_error("ODE step must be positive and finite");
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw input_error("ODE final time must be positive and finite");
}

}  // namespace detail

/// Throws input_error when the definition breaks its invariants.
inline void validate(const MapDefinition& def) {
  if (!std::isfinite(def.alpha) || !std::isfinite(def.beta) || !(def.alpha < def.beta))
    throw input_error("map domain requires finite alpha < beta");

  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Logistic>) {
          if (!(m.r > 0.0 && m.r <= 4.0)) throw input_error("logistic r must lie in (0, 4]");
          if (m.iterations < 1) throw input_error("logistic iterations must be >= 1");
          if (def.alpha < 0.0 || def.beta > 1.0)
            throw input_error("logistic domain must lie inside [0, 1]");
        } else if constexpr (std::is_same_v<M, Duffing> || std::is_same_v<M, Pendulum>) {
          detail::require_ode_params(m.t_final, m.step);
        } else if constexpr (std::is_same_v<M, TableMap>) {
          if (m.xs.size() < 2 || m.xs.size() != m.ys.size())
            throw input_error("table map needs at least two (x, y) rows");
          for (std::size_t i = 1; i < m.xs.size(); ++i)
            if (!(m.xs[i] > m.xs[i - 1]))
              throw input_error("table map x values must be strictly increasing");
          for (double y : m.ys)
            if (!std::isfinite(y)) throw input_error("table map y values must be finite");
          if (m.xs.front() > def.alpha || m.xs.back() < def.beta)
            throw input_error("table map samples must span [alpha, beta]");
        }
      },
      def.kind);
}

// ---------------------------------------------------------------------------
// Closed-form maps
// ---------------------------------------------------------------------------

inline double logistic_iterate(double r, int iterations, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw input_error("logistic state must lie in [0, 1]");
  if (!(r > 0.0 && r <= 4.0)) throw input_error("logistic r must lie in (0, 4]");
  if (iterations < 1) throw input_error("logistic iteration count must be >= 1");
  for (int i = 0; i < iterations; ++i) x = r * x * (1.0 - x);
  return x;
}

inline double oscillator_map(double k, double amplitude, double omega, double t, double x,
                             double phase_scale = 1.0) {
  return k * x + amplitude * std::cos(omega * t + phase_scale * x);
}

// ---------------------------------------------------------------------------
// Second-order ODEs y'' = f(y), integrated with fixed-step RK4
// ---------------------------------------------------------------------------

enum class OdeSystem { duffing, pendulum };

struct OdeState {
  double y = 0.0;
  double v = 0.0;
};

inline double ode_force(OdeSystem system, double y) {
  return system == OdeSystem::duffing ? -4.0 * y * y * y : -std::sin(y);
}

/// Conserved energy of the Duffing system, v^2/2 + y^4.
inline double duffing_energy(const OdeState& s) { return 0.5 * s.v * s.v + s.y * s.y * s.y * s.y; }

/// Number of RK4 steps used for (t_final, step). When t_final/step is not an
/// integer the step is shrunk so that the last step lands on t_final.
inline long rk4_step_count(double t_final, double step) {
  const double ratio = t_final / step;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest))
    return std::max(1L, static_cast<long>(nearest));
  return static_cast<long>(std::ceil(ratio));
}

inline OdeState integrate_ivp(OdeSystem system, double y0, double v0, double t_final,
                              double step) {
  detail::require_ode_params(t_final, step);
  const long steps = rk4_step_count(t_final, step);
  const double h = t_final / static_cast<double>(steps);

  double y = y0;
  double v = v0;
  for (long n = 0; n < steps; ++n) {
    const double k1y = v;
    const double k1v = ode_force(system, y);
    const double k2y = v + 0.5 * h * k1v;
    const double k2v = ode_force(system, y + 0.5 * h * k1y);
    const double k3y = v + 0.5 * h * k2v;
    const double k3v = ode_force(system, y + 0.5 * h * k2y);
    const double k4y = v + h * k3v;
    const double k4v = ode_force(system, y + h * k3y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!std::isfinite(y) || !std::isfinite(v)) {
      const double at = h * static_cast<double>(n + 1);
      throw divergence_error("ODE state became non-finite at t = " + std::to_string(at), at);
    }
  }
  return {y, v};
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline double interpolate_table(const TableMap& table, double x) {
  const auto& xs = table.xs;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  if (hi == 0) return table.ys.front();
  if (hi == xs.size()) return table.ys.back();
  const std::size_t lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return table.ys[lo] + w * (table.ys[hi] - table.ys[lo]);
}

// Evaluation without the domain check, shared by eval_map and sampling.
inline double eval_unchecked(const MapDefinition& def, double x) {
  return std::visit(
      [x](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Logistic>) {
          return logistic_iterate(m.r, m.iterations, x);
        } else if constexpr (std::is_same_v<M, Oscillator>) {
          return oscillator_map(m.k, m.amplitude, m.omega, m.t, x, m.phase_scale);
        } else if constexpr (std::is_same_v<M, Duffing>) {
          return integrate_ivp(OdeSystem::duffing, 0.0, x, m.t_final, m.step).y;
        } else if constexpr (std::is_same_v<M, Pendulum>) {
          return integrate_ivp(OdeSystem::pendulum, 0.0, x, m.t_final, m.step).y;
        } else {
          return interpolate_table(m, x);
        }
      },
      def.kind);
}

}  // namespace detail

/// Value of g at x. ODE variants return the position y(t_final) started from
/// y(0) = 0, v(0) = x.
inline double eval_map(const MapDefinition& def, double x) {
  if (!(x >= def.alpha && x <= def.beta))
    throw input_error("abscissa " + std::to_string(x) + " outside the map domain");
  return detail::eval_unchecked(def, x);
}

/// Closed-form derivative g'(x) where one exists (logistic and oscillator).
inline std::optional<double> map_derivative(const MapDefinition& def, double x) {
  if (const auto* m = std::get_if<Logistic>(&def.kind)) {
    double slope = 1.0;
    double s = x;
    for (int i = 0; i < m->iterations; ++i) {
      slope *= m->r * (1.0 - 2.0 * s);
      s = m->r * s * (1.0 - s);
    }
    return slope;
  }
  if (const auto* m = std::get_if<Oscillator>(&def.kind))
    return m->k - m->amplitude * m->phase_scale * std::sin(m->omega * m->t + m->phase_scale * x);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Uniform sampling
// ---------------------------------------------------------------------------

struct GridSpec {
  int n_div = 400;
};

struct SampledMap {
  std::vector<double> xs;
  std::vector<double> ys;
  double alpha = 0.0;
  double beta = 1.0;
  double g_min = 0.0;
  double g_max = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return xs.size(); }
  [[nodiscard]] int n_div() const noexcept { return static_cast<int>(xs.size()) - 1; }
};

inline void validate(const GridSpec& grid) {
  if (grid.n_div < 4) throw input_error("grid needs n_div >= 4");
}

/// x_i = alpha + i (beta - alpha) / n_div, with the last abscissa pinned to beta.
inline std::vector<double> uniform_abscissae(double alpha, double beta, int n_div) {
  std::vector<double> xs(static_cast<std::size_t>(n_div) + 1);
  const double width = beta - alpha;
  for (int i = 0; i <= n_div; ++i)
    xs[static_cast<std::size_t>(i)] = alpha + width * static_cast<double>(i) / n_div;
  xs.back() = beta;
  return xs;
}

/// Samples any callable g on the uniform grid. Points are independent, so they
/// may be evaluated on several threads; each writes only its own slot.
template <class Fn>
SampledMap sample_function(Fn&& g, double alpha, double beta, GridSpec grid,
                           unsigned threads = 1) {
  validate(grid);
  if (!(alpha < beta)) throw input_error("sampling requires alpha < beta");
  SampledMap out;
  out.alpha = alpha;
  out.beta = beta;
  out.xs = uniform_abscissae(alpha, beta, grid.n_div);
  out.ys.resize(out.xs.size());
  parallel_for(out.xs.size(), threads, [&](std::size_t i) { out.ys[i] = g(out.xs[i]); });
  for (double y : out.ys)
    if (!std::isfinite(y)) throw numerical_error("map produced a non-finite sample");
  const auto [lo, hi] = std::minmax_element(out.ys.begin(), out.ys.end());
  out.g_min = *lo;
  out.g_max = *hi;
  return out;
}

inline SampledMap sample_map(const MapDefinition& def, GridSpec grid, unsigned threads = 1) {
  validate(def);
  return sample_function([&def](double x) { return detail::eval_unchecked(def, x); },
                         def.alpha, def.beta, grid, threads);
}

}  // namespace fdf
