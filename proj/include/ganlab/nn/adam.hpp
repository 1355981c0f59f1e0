#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ganlab/core/error.hpp"

namespace ganlab::nn {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates for one parameter vector.
class AdamState {
 public:
  AdamState() = default;
  AdamState(Eigen::Index size, AdamConfig config = {})
      : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

  const AdamConfig& config() const { return config_; }
  AdamConfig& config() { return config_; }
  std::int64_t step_count() const { return step_; }
  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }
  Eigen::Index size() const { return m_.size(); }

  /// One bias-corrected ADAM descent step: params -= lr * mhat / (sqrt(vhat) + eps).
  /// Pass negated gradients to ascend.
  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
      throw std::invalid_argument("adam_step: expected vectors of length " + std::to_string(m_.size()) +
                                  ", got params " + std::to_string(params.size()) + " and grads " +
                                  std::to_string(grads.size()));
    }
    for (Eigen::Index i = 0; i < grads.size(); ++i) {
      if (!std::isfinite(grads[i])) {
        throw NumericalError("adam_step: non-finite gradient " + std::to_string(grads[i]) + " at coordinate " +
                             std::to_string(i) + " (step " + std::to_string(step_ + 1) + ")");
      }
    }
    ++step_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    m_ = b1 * m_ + (1.0 - b1) * grads;
    v_ = b2 * v_ + (1.0 - b2) * grads.cwiseProduct(grads);
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    const double lr = config_.learning_rate;
    const double eps = config_.epsilon;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      const double mhat = m_[i] / c1;
      const double vhat = v_[i] / c2;
      params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }

 private:
  AdamConfig config_;
  std::int64_t step_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

inline void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params,
                      const Eigen::Ref<const Eigen::VectorXd>& grads) {
  state.step(params, grads);
}

}  // namespace ganlab::nn
