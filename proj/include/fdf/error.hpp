#pragma once

#include <stdexcept>
#include <string>

namespace fdf {

/// Failure classes. The CLI maps each class onto a stable exit code.
enum class error_kind {
  input,       // bad arguments, malformed config or table data
  degenerate,  // map or density carries no usable structure
  numerical,   // divergence or an internal numeric inconsistency
};

class error : public std::runtime_error {
 public:
  error(error_kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] error_kind kind() const noexcept { return kind_; }

 private:
  error_kind kind_;
};

struct input_error : error {
  explicit input_error(const std::string& what) : error(error_kind::input, what) {}
};

/// Query outside [g_min, g_max] or outside the unfolded range [0, S].
struct range_error : error {
  explicit range_error(const std::string& what) : error(error_kind::input, what) {}
};

/// A value was routed to a branch whose image does not contain it.
struct branch_error : error {
  explicit branch_error(const std::string& what) : error(error_kind::input, what) {}
};

struct degenerate_error : error {
  explicit degenerate_error(const std::string& what)
      : error(error_kind::degenerate, what) {}
};

/// Non-finite ODE state. Carries the integration time at which it happened.
struct divergence_error : error {
  divergence_error(const std::string& what, double time)
      : error(error_kind::numerical, what), time(time) {}
  double time;
};

struct numerical_error : error {
  explicit numerical_error(const std::string& what)
      : error(error_kind::numerical, what) {}
};

}  // namespace fdf
