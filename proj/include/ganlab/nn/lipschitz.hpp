#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ganlab/nn/net.hpp"

namespace ganlab::nn {

struct LipschitzBounds {
  double wrt_params = 0.0;  // L: output change per unit change of the flat parameters
  double wrt_input = 0.0;   // L': output change per unit change of the input
};

/// Upper bound on the spectral norm: min(Frobenius, sqrt(|W|_1 |W|_inf)).
inline double operator_norm_upper_bound(const Matrix& w) {
  if (w.size() == 0) return 0.0;
  const double frob = w.norm();
  const double norm1 = w.cwiseAbs().colwise().sum().maxCoeff();
  const double norm_inf = w.cwiseAbs().rowwise().sum().maxCoeff();
  return std::min(frob, std::sqrt(norm1 * norm_inf));
}

inline double activation_lipschitz(Activation a) { return a == Activation::sigmoid ? 0.25 : 1.0; }

/// Bounds on the Euclidean norm of every layer's pre-activation for inputs
/// with norm at most `input_norm_cap`. Entry l bounds layer l's affine output.
inline std::vector<double> preactivation_norm_bounds(const MultilayerNet& net, double input_norm_cap) {
  std::vector<double> out;
  double a = input_norm_cap;
  for (std::size_t l = 0; l < net.affine_count(); ++l) {
    const double z = operator_norm_upper_bound(net.weight(l)) * a + net.bias(l).norm();
    out.push_back(z);
    // ReLU, clamp and identity never increase the norm; sigmoid outputs lie in [0,1].
    a = net.activation_of(l) == Activation::sigmoid ? std::sqrt(static_cast<double>(net.weight(l).rows()))
                                                    : z;
  }
  return out;
}

/// Conservative Lipschitz bounds. Neither is claimed tight.
///
/// wrt_input is the product of per-layer operator-norm bounds times the
/// activation Lipschitz constants. wrt_params sums, over layers, the bound
/// on that layer's input norm (plus one for the bias) times the product of
/// downstream layer norms; inputs are restricted to norm <= input_norm_cap.
inline LipschitzBounds lipschitz_upper_bounds(const MultilayerNet& net, double input_norm_cap = 1.0) {
  const std::size_t L = net.affine_count();
  std::vector<double> gain(L);
  for (std::size_t l = 0; l < L; ++l)
    gain[l] = operator_norm_upper_bound(net.weight(l)) * activation_lipschitz(net.activation_of(l));

  LipschitzBounds out;
  out.wrt_input = 1.0;
  for (double g : gain) out.wrt_input *= g;

  const std::vector<double> pre = preactivation_norm_bounds(net, input_norm_cap);
  double wrt_params = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    double layer_input = l == 0 ? input_norm_cap : pre[l - 1];
    if (l > 0 && net.activation_of(l - 1) == Activation::sigmoid)
      layer_input = std::sqrt(static_cast<double>(net.weight(l - 1).rows()));
    double downstream = activation_lipschitz(net.activation_of(l));
    for (std::size_t j = l + 1; j < L; ++j) downstream *= gain[j];
    wrt_params += (layer_input + 1.0) * downstream;
  }
  out.wrt_params = wrt_params;
  return out;
}

}  // namespace ganlab::nn
