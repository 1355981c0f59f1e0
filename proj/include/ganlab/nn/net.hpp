#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ganlab/core/random.hpp"

namespace ganlab::nn {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Output activations. Hidden layers are always ReLU.
enum class Activation { identity, relu, sigmoid, clamp01 };

inline std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::clamp01: return "clamp01";
  }
  return "identity";
}

inline Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "clamp01") return Activation::clamp01;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

namespace detail {

inline Matrix activate(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::sigmoid:
      return z.unaryExpr([](double t) {
        // Split by sign so exp never overflows.
        if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
        const double e = std::exp(t);
        return e / (1.0 + e);
      });
    case Activation::clamp01: return z.cwiseMax(0.0).cwiseMin(1.0);
  }
  return z;
}

// Derivative from pre-activation z and post-activation y. Kinks take the
// value 0: relu'(0) = 0, clamp01'(0) = clamp01'(1) = 0.
inline Matrix activation_derivative(Activation a, const Matrix& z, const Matrix& y) {
  switch (a) {
    case Activation::identity: return Matrix::Ones(z.rows(), z.cols());
    case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
    case Activation::sigmoid: return (y.array() * (1.0 - y.array())).matrix();
    case Activation::clamp01:
      return ((z.array() > 0.0) && (z.array() < 1.0)).cast<double>().matrix();
  }
  return Matrix::Ones(z.rows(), z.cols());
}

}  // namespace detail

/// Fully connected feed-forward network.
///
/// `layer_dims` lists the width of every layer including the input, so a
/// net with k layer dims has k-1 affine maps. Hidden layers use ReLU; the
/// last affine map uses `output_activation`.
///
/// Flat parameter order: layer-major, weights before biases, each weight
/// matrix (out x in) row-major.
class MultilayerNet {
 public:
  MultilayerNet() = default;

  explicit MultilayerNet(std::vector<Index> layer_dims,
                         Activation output_activation = Activation::identity)
      : dims_(std::move(layer_dims)), output_activation_(output_activation) {
    if (dims_.size() < 2) throw std::invalid_argument("MultilayerNet needs at least 2 layer dims");
    for (Index d : dims_) {
      if (d <= 0) throw std::invalid_argument("MultilayerNet layer dims must be positive");
    }
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      weights_.push_back(Matrix::Zero(dims_[l + 1], dims_[l]));
      biases_.push_back(Vector::Zero(dims_[l + 1]));
    }
  }

  /// Weights uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); zero biases.
  static MultilayerNet glorot_uniform(std::vector<Index> layer_dims, Activation output_activation,
                                      Rng& rng) {
    MultilayerNet net(std::move(layer_dims), output_activation);
    for (auto& w : net.weights_) {
      const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
      for (Index r = 0; r < w.rows(); ++r)
        for (Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-a, a);
    }
    return net;
  }

  const std::vector<Index>& layer_dims() const { return dims_; }
  std::size_t layer_count() const { return dims_.size(); }
  std::size_t affine_count() const { return weights_.size(); }
  Index input_dim() const { return dims_.front(); }
  Index output_dim() const { return dims_.back(); }
  Activation output_activation() const { return output_activation_; }

  Activation activation_of(std::size_t affine_index) const {
    return affine_index + 1 == weights_.size() ? output_activation_ : Activation::relu;
  }

  Index param_count() const {
    Index p = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) p += weights_[l].size() + biases_[l].size();
    return p;
  }

  /// Offset of layer l's weight block in the flat parameter vector.
  Index param_offset(std::size_t l) const {
    Index off = 0;
    for (std::size_t i = 0; i < l; ++i) off += weights_[i].size() + biases_[i].size();
    return off;
  }

  Matrix& weight(std::size_t l) { return weights_.at(l); }
  const Matrix& weight(std::size_t l) const { return weights_.at(l); }
  Vector& bias(std::size_t l) { return biases_.at(l); }
  const Vector& bias(std::size_t l) const { return biases_.at(l); }

  Vector params() const {
    Vector out(param_count());
    Index off = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      const Matrix& w = weights_[l];
      Eigen::Map<RowMajorMatrix>(out.data() + off, w.rows(), w.cols()) = w;
      off += w.size();
      out.segment(off, biases_[l].size()) = biases_[l];
      off += biases_[l].size();
    }
    return out;
  }

  void set_params(const Eigen::Ref<const Vector>& flat) {
    if (flat.size() != param_count()) {
      throw std::invalid_argument("set_params: expected " + std::to_string(param_count()) +
                                  " values, got " + std::to_string(flat.size()));
    }
    Index off = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix& w = weights_[l];
      w = Eigen::Map<const RowMajorMatrix>(flat.data() + off, w.rows(), w.cols());
      off += w.size();
      biases_[l] = flat.segment(off, biases_[l].size());
      off += biases_[l].size();
    }
  }

  /// Per-layer values recorded by a batched forward pass.
  struct Tape {
    std::vector<Matrix> pre;   // pre-activation of each affine layer
    std::vector<Matrix> post;  // post[0] is the input, post[l+1] the output of layer l
  };

  Vector forward(const Eigen::Ref<const Vector>& input) const {
    check_input_rows(input.size());
    Matrix x = input;
    return forward_batch(x).col(0);
  }

  /// Batched forward pass; one sample per column.
  Matrix forward_batch(const Eigen::Ref<const Matrix>& inputs) const {
    check_input_rows(inputs.rows());
    Matrix a = inputs;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      a = detail::activate(activation_of(l), z);
    }
    return a;
  }

  Matrix forward_batch(const Eigen::Ref<const Matrix>& inputs, Tape& tape) const {
    check_input_rows(inputs.rows());
    tape.pre.resize(weights_.size());
    tape.post.resize(weights_.size() + 1);
    tape.post[0] = inputs;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      tape.pre[l].noalias() = weights_[l] * tape.post[l];
      tape.pre[l].colwise() += biases_[l];
      tape.post[l + 1] = detail::activate(activation_of(l), tape.pre[l]);
    }
    return tape.post.back();
  }

  /// Reverse pass over a recorded tape. Adds sum over columns of
  /// d<cotangent, output>/d(params) into `grad`. Returns the cotangent with
  /// respect to the inputs when `want_input_cotangent` is set, otherwise an
  /// empty matrix.
  Matrix backward_batch(const Tape& tape, const Eigen::Ref<const Matrix>& output_cotangent,
                        Eigen::Ref<Vector> grad, bool want_input_cotangent = false) const {
    if (grad.size() != param_count()) throw std::invalid_argument("backward: gradient size mismatch");
    if (tape.post.size() != weights_.size() + 1)
      throw std::invalid_argument("backward: tape does not match network");
    if (output_cotangent.rows() != output_dim() || output_cotangent.cols() != tape.post.back().cols())
      throw std::invalid_argument("backward: cotangent shape mismatch");

    const std::size_t L = weights_.size();
    Matrix delta = output_cotangent.array() *
                   detail::activation_derivative(activation_of(L - 1), tape.pre[L - 1], tape.post[L]).array();
    for (std::size_t l = L; l-- > 0;) {
      const Index off = param_offset(l);
      const Matrix& w = weights_[l];
      Eigen::Map<RowMajorMatrix>(grad.data() + off, w.rows(), w.cols()).noalias() +=
          delta * tape.post[l].transpose();
      grad.segment(off + w.size(), w.rows()) += delta.rowwise().sum();
      if (l > 0) {
        Matrix back = w.transpose() * delta;
        delta = back.array() * (tape.pre[l - 1].array() > 0.0).cast<double>();
      } else if (want_input_cotangent) {
        return w.transpose() * delta;
      }
    }
    return {};
  }

  /// Cotangent with respect to the inputs only; parameter gradients skipped.
  Matrix input_cotangent(const Tape& tape, const Eigen::Ref<const Matrix>& output_cotangent) const {
    const std::size_t L = weights_.size();
    Matrix delta = output_cotangent.array() *
                   detail::activation_derivative(activation_of(L - 1), tape.pre[L - 1], tape.post[L]).array();
    for (std::size_t l = L; l-- > 1;) {
      Matrix back = weights_[l].transpose() * delta;
      delta = back.array() * (tape.pre[l - 1].array() > 0.0).cast<double>();
    }
    return weights_[0].transpose() * delta;
  }

  /// Gradient of <cotangent, forward(input)> with respect to the flat parameters.
  Vector backward(const Eigen::Ref<const Vector>& input,
                  const Eigen::Ref<const Vector>& output_cotangent) const {
    check_input_rows(input.size());
    if (output_cotangent.size() != output_dim())
      throw std::invalid_argument("backward: cotangent length " + std::to_string(output_cotangent.size()) +
                                  " does not match output dim " + std::to_string(output_dim()));
    Tape tape;
    Matrix x = input;
    forward_batch(x, tape);
    Vector grad = Vector::Zero(param_count());
    Matrix cot = output_cotangent;
    backward_batch(tape, cot, grad);
    return grad;
  }

 private:
  void check_input_rows(Index rows) const {
    if (dims_.empty()) throw std::invalid_argument("forward on an empty network");
    if (rows != dims_.front()) {
      throw std::invalid_argument("input dimension " + std::to_string(rows) +
                                  " does not match network input dim " + std::to_string(dims_.front()));
    }
  }

  std::vector<Index> dims_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  Activation output_activation_ = Activation::identity;
};

}  // namespace ganlab::nn
