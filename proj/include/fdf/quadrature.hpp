#pragma once

#include <cstddef>

#include "fdf/error.hpp"

namespace fdf {

/// Composite Simpson rule on `panels` equal panels (panels must be even).
template <class Fn>
double simpson(Fn&& f, double a, double b, std::size_t panels) {
  if (panels == 0 || panels % 2 != 0) throw input_error("Simpson rule needs an even panel count");
  const double h = (b - a) / static_cast<double>(panels);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < panels; ++i) {
    const double fx = f(a + h * static_cast<double>(i));
    (i % 2 == 1 ? odd : even) += fx;
  }
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

}  // namespace fdf
