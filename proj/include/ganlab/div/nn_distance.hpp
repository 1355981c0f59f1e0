#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ganlab/core/error.hpp"
#include "ganlab/core/random.hpp"
#include "ganlab/dist/distributions.hpp"
#include "ganlab/div/measuring.hpp"
#include "ganlab/nn/adam.hpp"
#include "ganlab/nn/net.hpp"

namespace ganlab::div {

using nn::Index;
using nn::Matrix;
using nn::Vector;
using nn::MultilayerNet;

/// Point set with probability weights; points stored one per column.
/// Empty weights mean uniform.
struct WeightedSamples {
  Matrix points;
  Vector weights;

  static WeightedSamples uniform(const dist::EmpiricalDistribution& e) { return {e.columns(), {}}; }

  Index size() const { return points.cols(); }
  Index dim() const { return points.rows(); }
  bool is_uniform() const { return weights.size() == 0; }
  double weight(Index k) const { return is_uniform() ? 1.0 / static_cast<double>(size()) : weights[k]; }
};

namespace detail {

// Weighted running mean of phi(D) (or phi(1 - D)). A constant sequence is
// averaged bit-exactly.
inline double phi_mean(const MeasuringFunction& phi, const Matrix& outputs, const WeightedSamples& s,
                       bool complement) {
  double mean = 0.0, total = 0.0;
  for (Index k = 0; k < outputs.cols(); ++k) {
    const double d = outputs(0, k);
    if (!(d >= 0.0 && d <= 1.0))
      throw std::domain_error("discriminator output " + std::to_string(d) + " outside [0, 1]");
    const double w = s.weight(k);
    if (w <= 0.0) continue;
    total += w;
    mean += (w / total) * (phi.value(complement ? 1.0 - d : d) - mean);
  }
  return mean;
}

inline void check_discriminator(const MultilayerNet& d, Index dim) {
  if (d.input_dim() != dim)
    throw std::invalid_argument("discriminator input dim " + std::to_string(d.input_dim()) +
                                " does not match sample dim " + std::to_string(dim));
  if (d.output_dim() != 1) throw std::invalid_argument("discriminator must have a single output");
  if (d.output_activation() != nn::Activation::sigmoid && d.output_activation() != nn::Activation::clamp01)
    throw std::invalid_argument("discriminator output activation must map into [0, 1]");
}

}  // namespace detail

/// E_a[phi(D(x))] + E_b[phi(1 - D(y))] - 2 phi(1/2).
inline double discriminator_objective(const MultilayerNet& disc, const MeasuringFunction& phi,
                                      const WeightedSamples& a, const WeightedSamples& b) {
  detail::check_discriminator(disc, a.dim());
  const double ea = detail::phi_mean(phi, disc.forward_batch(a.points), a, false);
  const double eb = detail::phi_mean(phi, disc.forward_batch(b.points), b, true);
  return ea + eb - 2.0 * phi.at_half();
}

struct NnDistanceOptions {
  nn::AdamConfig adam{.learning_rate = 1e-3};
  /// Minibatch size per side; 0 trains on the full sets.
  Index batch_size = 0;
  /// Full-objective evaluation cadence in minibatch mode.
  int eval_every = 25;
  /// Also train a discriminator on the swapped objective, realising 1 - D.
  bool include_complement = true;
  nn::Activation output_activation = nn::Activation::sigmoid;
};

struct DistanceEstimate {
  double value = 0.0;
  Index samples_a = 0;
  Index samples_b = 0;
  int budget = 0;
  std::uint64_t seed = 0;
  /// The best value came from the complemented discriminator 1 - D.
  bool complemented = false;
  int best_step = 0;
  std::vector<Index> disc_dims;
  Vector best_params;
};

namespace detail {

struct AscentResult {
  double best = -std::numeric_limits<double>::infinity();
  int best_step = 0;
  Vector best_params;
};

inline Matrix draw_batch(const WeightedSamples& s, Index batch, Rng& rng, Vector& weights) {
  Matrix out(s.dim(), batch);
  weights.resize(batch);
  double total = 0.0;
  for (Index j = 0; j < batch; ++j) {
    const Index k = static_cast<Index>(rng.index(static_cast<std::uint64_t>(s.size())));
    out.col(j) = s.points.col(k);
    weights[j] = s.weight(k);
    total += weights[j];
  }
  weights /= total;
  return out;
}

// Gradient of E_s[phi(D)] (complement=false) or E_s[phi(1-D)] (true) wrt
// the discriminator output, per column.
inline Matrix phi_cotangent(const MeasuringFunction& phi, const Matrix& outputs, const WeightedSamples& s,
                            bool complement, double scale) {
  Matrix cot(1, outputs.cols());
  for (Index k = 0; k < outputs.cols(); ++k) {
    const double d = outputs(0, k);
    cot(0, k) = complement ? -scale * s.weight(k) * phi.derivative(1.0 - d) : scale * s.weight(k) * phi.derivative(d);
  }
  return cot;
}

// Maximise discriminator_objective(D, a, b) by ADAM from a seeded Glorot
// initialisation. Tracks the best full-set objective seen.
inline AscentResult ascend(const MeasuringFunction& phi, const WeightedSamples& a, const WeightedSamples& b,
                           const std::vector<Index>& dims, int budget, std::uint64_t seed,
                           const NnDistanceOptions& opts) {
  Rng init(derive_seed(seed, 11));
  MultilayerNet disc = MultilayerNet::glorot_uniform(dims, opts.output_activation, init);
  detail::check_discriminator(disc, a.dim());
  Rng batch_rng(derive_seed(seed, 12));
  nn::AdamState adam(disc.param_count(), opts.adam);
  Vector params = disc.params();
  const bool minibatch = opts.batch_size > 0 && (a.size() > opts.batch_size || b.size() > opts.batch_size);

  AscentResult result;
  auto record = [&](double value, int step) {
    if (!std::isfinite(value)) throw NumericalError("nn_distance: non-finite objective at step " + std::to_string(step));
    if (value > result.best) {
      result.best = value;
      result.best_step = step;
      result.best_params = params;
    }
  };

  MultilayerNet::Tape ta, tb;
  for (int step = 0; step < budget; ++step) {
    Vector grad = Vector::Zero(disc.param_count());
    if (!minibatch) {
      const Matrix out_a = disc.forward_batch(a.points, ta);
      const Matrix out_b = disc.forward_batch(b.points, tb);
      record(phi_mean(phi, out_a, a, false) + phi_mean(phi, out_b, b, true) - 2.0 * phi.at_half(), step);
      // Descent on the negated objective.
      disc.backward_batch(ta, phi_cotangent(phi, out_a, a, false, -1.0), grad);
      disc.backward_batch(tb, phi_cotangent(phi, out_b, b, true, -1.0), grad);
    } else {
      if (step % opts.eval_every == 0) record(discriminator_objective(disc, phi, a, b), step);
      Vector wa, wb;
      const Index na = std::min(opts.batch_size, a.size());
      const Index nb = std::min(opts.batch_size, b.size());
      WeightedSamples ba{draw_batch(a, na, batch_rng, wa), {}};
      WeightedSamples bb{draw_batch(b, nb, batch_rng, wb), {}};
      ba.weights = std::move(wa);
      bb.weights = std::move(wb);
      const Matrix out_a = disc.forward_batch(ba.points, ta);
      const Matrix out_b = disc.forward_batch(bb.points, tb);
      disc.backward_batch(ta, phi_cotangent(phi, out_a, ba, false, -1.0), grad);
      disc.backward_batch(tb, phi_cotangent(phi, out_b, bb, true, -1.0), grad);
    }
    for (Index i = 0; i < grad.size(); ++i) {
      if (!std::isfinite(grad[i]))
        throw NumericalError("nn_distance: non-finite gradient at step " + std::to_string(step));
    }
    adam.step(params, grad);
    disc.set_params(params);
  }
  record(discriminator_objective(disc, phi, a, b), budget);
  return result;
}

}  // namespace detail

/// Lower-bound estimate of the neural-net distance
///   sup_D E_a[phi(D(x))] + E_b[phi(1 - D(y))] - 2 phi(1/2)
/// over discriminators with layer dims `disc_dims` (input dim first, one
/// output). The inner maximisation is nonconvex, so the returned value is
/// the best objective seen over `budget` ADAM steps, never more than the sup.
inline DistanceEstimate nn_distance_weighted(const MeasuringFunction& phi, const WeightedSamples& a,
                                             const WeightedSamples& b, const std::vector<Index>& disc_dims,
                                             int budget, std::uint64_t seed, const NnDistanceOptions& opts = {}) {
  if (budget < 1) throw std::invalid_argument("nn_distance: budget must be >= 1");
  if (a.dim() != b.dim()) throw std::invalid_argument("nn_distance: dimension mismatch");
  if (disc_dims.empty() || disc_dims.back() != 1)
    throw std::invalid_argument("nn_distance: discriminator must have output dim 1");

  DistanceEstimate est;
  est.samples_a = a.size();
  est.samples_b = b.size();
  est.budget = budget;
  est.seed = seed;
  est.disc_dims = disc_dims;

  detail::AscentResult direct = detail::ascend(phi, a, b, disc_dims, budget, derive_seed(seed, 1), opts);
  est.value = direct.best;
  est.best_step = direct.best_step;
  est.best_params = std::move(direct.best_params);
  if (opts.include_complement) {
    // Maximising over D' with the roles of a and b swapped is maximising the
    // original objective over 1 - D'.
    detail::AscentResult swapped = detail::ascend(phi, b, a, disc_dims, budget, derive_seed(seed, 2), opts);
    if (swapped.best > est.value) {
      est.value = swapped.best;
      est.best_step = swapped.best_step;
      est.best_params = std::move(swapped.best_params);
      est.complemented = true;
    }
  }
  // The constant-1/2 discriminator lies in every class considered here and
  // scores exactly 0, so the estimate never needs to be negative.
  MultilayerNet half(disc_dims, opts.output_activation);
  if (opts.output_activation != nn::Activation::sigmoid) half.bias(half.affine_count() - 1)[0] = 0.5;
  const double at_half = discriminator_objective(half, phi, a, b);
  if (at_half > est.value) {
    est.value = at_half;
    est.best_step = 0;
    est.best_params = half.params();
    est.complemented = false;
  }
  return est;
}

inline DistanceEstimate nn_distance(const MeasuringFunction& phi, const dist::EmpiricalDistribution& a,
                                    const dist::EmpiricalDistribution& b, const std::vector<Index>& disc_dims,
                                    int budget, std::uint64_t seed, const NnDistanceOptions& opts = {}) {
  return nn_distance_weighted(phi, WeightedSamples::uniform(a), WeightedSamples::uniform(b), disc_dims, budget,
                              seed, opts);
}

}  // namespace ganlab::div
