#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ganlab/dist/distributions.hpp"
#include "ganlab/div/measuring.hpp"
#include "ganlab/div/nn_distance.hpp"
#include "ganlab/folding/fold.hpp"

namespace ganlab::folding {

struct PureEquilibriumOptions {
  double delta_tv = 0.01;
  Index noise_dim = 1;
  Index samples = 3000;  // folded-generator draws
  div::NnDistanceOptions nn;
};

struct PureEquilibriumResult {
  double epsilon = 0.0;            // challenger's best objective
  double half_payoff = 0.0;        // payoff of the constant-1/2 discriminator
  double expected_half_payoff = 0.0;
  std::vector<Index> selection_counts;
  Index folded_param_count = 0;
  Vector shift;  // added to the support before folding
};

/// Folds T constant generators that emit the T support points and measures
/// how far a trained challenger can push the objective above 2 phi(1/2).
/// ReLU outputs are nonnegative, so the support is shifted into the positive
/// orthant for the construction and shifted back before evaluation.
inline PureEquilibriumResult pure_equilibrium_demo(const dist::EmpiricalDistribution& target,
                                                   const div::MeasuringFunction& phi,
                                                   const std::vector<Index>& challenger_dims, int budget,
                                                   std::uint64_t seed, const PureEquilibriumOptions& opts = {}) {
  const Index T = target.size();
  const Index d = target.dim();
  PureEquilibriumResult res;
  res.shift = (-target.samples().colwise().minCoeff().transpose()).cwiseMax(0.0).array() + 1.0;

  std::vector<MultilayerNet> comps;
  for (Index t = 0; t < T; ++t) comps.push_back(constant_generator(target.row(t) + res.shift, opts.noise_dim));
  const FoldedGenerator fg = fold(comps, opts.delta_tv);
  res.folded_param_count = fg.param_count();

  Rng rng(derive_seed(seed, 5));
  Matrix probes(fg.net.input_dim(), opts.samples);
  for (Index j = 0; j < probes.cols(); ++j)
    for (Index i = 0; i < probes.rows(); ++i) probes(i, j) = rng.normal();
  Matrix fake = fg.net.forward_batch(probes);
  fake.colwise() -= res.shift;
  res.selection_counts.assign(static_cast<std::size_t>(T), 0);
  for (Index j = 0; j < probes.cols(); ++j) ++res.selection_counts[static_cast<std::size_t>(fg.ideal_component(probes(0, j)))];

  const div::WeightedSamples real = div::WeightedSamples::uniform(target);
  const div::WeightedSamples gen{fake, {}};

  // D = sigmoid(0) = 1/2 everywhere.
  MultilayerNet half(challenger_dims, nn::Activation::sigmoid);
  res.half_payoff = div::discriminator_objective(half, phi, real, gen) + 2.0 * phi.at_half();
  res.expected_half_payoff = 2.0 * phi.at_half();

  res.epsilon = div::nn_distance_weighted(phi, real, gen, challenger_dims, budget, seed, opts.nn).value;
  return res;
}

}  // namespace ganlab::folding
