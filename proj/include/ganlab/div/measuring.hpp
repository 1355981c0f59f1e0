#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ganlab/core/csv.hpp"

namespace ganlab::div {

/// Concave map applied to discriminator outputs in the two-sample objective.
///
///   LogShifted(delta): phi(x) = log(delta + (1 - delta) x), values in [log delta, 0],
///                      Lipschitz constant (1 - delta) / delta.
///   Linear:            phi(x) = x, values in [0, 1], Lipschitz constant 1.
class MeasuringFunction {
 public:
  enum class Kind { log_shifted, linear };

  static MeasuringFunction log_shifted(double delta = 0.1) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("log_shifted: delta must lie in (0, 1)");
    return MeasuringFunction(Kind::log_shifted, delta);
  }

  static MeasuringFunction linear() { return MeasuringFunction(Kind::linear, 0.0); }

  /// "linear", "log" (delta 0.1) or "log:<delta>".
  static MeasuringFunction parse(std::string_view text) {
    if (text == "linear") return linear();
    if (text == "log") return log_shifted();
    if (text.starts_with("log:")) return log_shifted(csv::parse_double(text.substr(4)));
    throw std::invalid_argument("unknown measuring function '" + std::string(text) + "'");
  }

  Kind kind() const { return kind_; }
  double delta() const { return delta_; }

  std::string name() const {
    return kind_ == Kind::linear ? "linear" : "log:" + csv::format(delta_);
  }

  /// Evaluation without the domain check, for hot loops whose inputs are in
  /// [0, 1] by construction.
  double value(double x) const {
    return kind_ == Kind::linear ? x : std::log(delta_ + (1.0 - delta_) * x);
  }

  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
      throw std::domain_error("measuring function argument " + csv::format(x) + " outside [0, 1]");
    return value(x);
  }

  double derivative(double x) const {
    return kind_ == Kind::linear ? 1.0 : (1.0 - delta_) / (delta_ + (1.0 - delta_) * x);
  }

  double min_value() const { return kind_ == Kind::linear ? 0.0 : std::log(delta_); }
  double max_value() const { return kind_ == Kind::linear ? 1.0 : 0.0; }

  /// Delta such that phi takes values in [-Delta, Delta].
  double range_bound() const { return kind_ == Kind::linear ? 1.0 : -std::log(delta_); }
  double lipschitz() const { return kind_ == Kind::linear ? 1.0 : (1.0 - delta_) / delta_; }

  double at_half() const { return value(0.5); }

  /// Upper end of the F-distance range: 2 max(phi) - 2 phi(1/2).
  double distance_upper_bound() const { return 2.0 * max_value() - 2.0 * at_half(); }

 private:
  MeasuringFunction(Kind kind, double delta) : kind_(kind), delta_(delta) {}

  Kind kind_;
  double delta_;
};

inline double phi_eval(const MeasuringFunction& phi, double x) { return phi(x); }

}  // namespace ganlab::div
