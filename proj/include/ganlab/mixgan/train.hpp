#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/core/random.hpp"
#include "ganlab/dist/distributions.hpp"
#include "ganlab/div/nn_distance.hpp"
#include "ganlab/mixgan/mixture.hpp"
#include "ganlab/nn/adam.hpp"

namespace ganlab::mixgan {

using dist::EmpiricalDistribution;

struct TrainConfig {
  int T = 1;
  int T_disc = 0;  // 0 means T
  int steps = 1000;
  Index batch_size = 64;
  double learning_rate = 1e-4;
  double entropy_weight = 1e-3;
  std::uint64_t seed = 0;
  std::string target = "ring";  // ring | gaussian1d | circle3
  int eval_every = 0;           // 0 disables periodic evaluation
  Index eval_samples = 10000;
  int disc_steps_per_gen_step = 1;
  std::vector<Index> gen_hidden{32, 32};
  std::vector<Index> disc_hidden{32, 32};
  Index noise_dim = 2;
  bool non_saturating = false;
  MeasuringFunction phi = MeasuringFunction::linear();

  int disc_count() const { return T_disc > 0 ? T_disc : T; }

  void validate() const {
    if (T < 1) throw std::invalid_argument("TrainConfig: T must be >= 1");
    if (T_disc < 0) throw std::invalid_argument("TrainConfig: T_disc must be >= 0");
    if (steps < 0) throw std::invalid_argument("TrainConfig: steps must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning rate must be positive");
    if (disc_steps_per_gen_step < 1) throw std::invalid_argument("TrainConfig: disc step ratio must be >= 1");
    if (noise_dim < 1) throw std::invalid_argument("TrainConfig: noise_dim must be >= 1");
    if (target != "ring" && target != "gaussian1d" && target != "circle3")
      throw std::invalid_argument("TrainConfig: unknown target '" + target + "'");
  }
};

/// Draws one real sample per call for the configured target.
using TargetSampler = std::function<Vector(Rng&)>;

inline Index target_dim(const std::string& id) { return id == "gaussian1d" ? 1 : 2; }

inline TargetSampler make_target(const std::string& id) {
  if (id == "ring") return [t = dist::RingTarget{}](Rng& r) { return t.draw(r); };
  if (id == "gaussian1d") return [](Rng& r) { return Vector::Constant(1, r.normal()); };
  if (id == "circle3") return [](Rng& r) { return dist::CirclePointTarget{}.draw(r); };
  throw std::invalid_argument("unknown target '" + id + "'");
}

struct LogRow {
  int step = 0;
  double objective = 0.0;
  Vector gen_weights;
  Vector disc_weights;
  int coverage = -1;  // -1 when not evaluated or not applicable
  double sample_mean = 0.0;
  double sample_std = 0.0;
};

struct TrainResult {
  GanMixture mixture;
  std::vector<LogRow> log;
  bool aborted = false;
  std::string abort_reason;
  int steps_completed = 0;
};

inline Matrix gaussian_noise(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

/// Pick a generator by its weight, then push Gaussian noise through it.
inline EmpiricalDistribution sample_mixture(const GanMixture& mix, Index n, std::uint64_t seed,
                                            std::vector<Index>* selection_counts = nullptr) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  Rng rng(seed);
  const Vector w = mix.gen_weights();
  std::vector<std::vector<Index>> slots(static_cast<std::size_t>(mix.gen_count()));
  for (Index k = 0; k < n; ++k) {
    const double u = rng.uniform();
    int pick = mix.gen_count() - 1;
    double acc = 0.0;
    for (int i = 0; i < mix.gen_count(); ++i) {
      acc += w[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    slots[pick].push_back(k);
  }
  const Matrix noise = gaussian_noise(mix.noise_dim(), n, rng);
  Matrix out(mix.data_dim(), n);
  for (int i = 0; i < mix.gen_count(); ++i) {
    const auto& idx = slots[i];
    if (idx.empty()) continue;
    Matrix h(noise.rows(), static_cast<Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) h.col(static_cast<Index>(c)) = noise.col(idx[c]);
    const Matrix y = mix.generators[i].forward_batch(h);
    for (std::size_t c = 0; c < idx.size(); ++c) out.col(idx[c]) = y.col(static_cast<Index>(c));
  }
  if (selection_counts) {
    selection_counts->clear();
    for (const auto& s : slots) selection_counts->push_back(static_cast<Index>(s.size()));
  }
  return EmpiricalDistribution::from_columns(out);
}

/// Number of modes receiving at least `min_fraction` of the samples within
/// `radius_sigmas` standard deviations of their centre.
inline int mode_coverage(const dist::RingTarget& target, const EmpiricalDistribution& samples,
                         double min_fraction = 0.02, double radius_sigmas = 3.0) {
  const double r = radius_sigmas * target.stddev;
  std::vector<Index> hits(static_cast<std::size_t>(target.modes), 0);
  for (Index k = 0; k < samples.size(); ++k) {
    const Vector x = samples.row(k);
    const int m = target.nearest_mode(x);
    if ((x - target.center(m)).norm() <= r) ++hits[m];
  }
  int covered = 0;
  for (Index h : hits)
    if (static_cast<double>(h) >= min_fraction * static_cast<double>(samples.size())) ++covered;
  return covered;
}

namespace detail {

inline Matrix real_batch(const TargetSampler& target, Index dim, Index n, Rng& rng) {
  Matrix m(dim, n);
  for (Index j = 0; j < n; ++j) m.col(j) = target(rng);
  return m;
}

inline std::vector<Matrix> noise_batches(const GanMixture& mix, Index n, Rng& rng) {
  std::vector<Matrix> out;
  for (int i = 0; i < mix.gen_count(); ++i) out.push_back(gaussian_noise(mix.noise_dim(), n, rng));
  return out;
}

inline std::vector<Index> with_ends(Index first, const std::vector<Index>& hidden, Index last) {
  std::vector<Index> dims{first};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(last);
  return dims;
}

}  // namespace detail

inline LogRow evaluate(const GanMixture& mix, const TrainConfig& cfg, int step, double objective) {
  LogRow row;
  row.step = step;
  row.objective = objective;
  row.gen_weights = mix.gen_weights();
  row.disc_weights = mix.disc_weights();
  if (cfg.eval_samples > 0) {
    const EmpiricalDistribution s = sample_mixture(mix, cfg.eval_samples, derive_seed(cfg.seed, 900 + step));
    if (cfg.target == "ring") row.coverage = mode_coverage(dist::RingTarget{}, s);
    row.sample_mean = s.samples().col(0).mean();
    const Vector c = s.samples().col(0).array() - row.sample_mean;
    row.sample_std = std::sqrt(c.squaredNorm() / static_cast<double>(std::max<Index>(1, s.size() - 1)));
  }
  return row;
}

/// Alternating mixture training. Each iteration takes
/// `disc_steps_per_gen_step` discriminator ascent steps on (v_j, alpha_v) and
/// then one generator descent step on (u_i, alpha_u); the opponent is frozen
/// during each step. Both players' logits are pulled toward uniform by the
/// entropy term.
inline TrainResult train(const TrainConfig& cfg) {
  cfg.validate();
  const Index dim = target_dim(cfg.target);
  MixtureArch arch;
  arch.gen_dims = detail::with_ends(cfg.noise_dim, cfg.gen_hidden, dim);
  arch.disc_dims = detail::with_ends(dim, cfg.disc_hidden, 1);
  arch.generators = cfg.T;
  arch.discriminators = cfg.disc_count();
  Rng init(derive_seed(cfg.seed, 1));
  TrainResult res;
  res.mixture = GanMixture::initialized(arch, cfg.phi, init);
  GanMixture& mix = res.mixture;

  const TargetSampler target = make_target(cfg.target);
  Rng data(derive_seed(cfg.seed, 2));
  const nn::AdamConfig adam{.learning_rate = cfg.learning_rate};
  std::vector<nn::AdamState> gen_adam, disc_adam;
  std::vector<Vector> gen_params, disc_params;
  for (const auto& g : mix.generators) {
    gen_adam.emplace_back(g.param_count(), adam);
    gen_params.push_back(g.params());
  }
  for (const auto& d : mix.discriminators) {
    disc_adam.emplace_back(d.param_count(), adam);
    disc_params.push_back(d.params());
  }
  nn::AdamState gen_logit_adam(cfg.T, adam), disc_logit_adam(cfg.disc_count(), adam);

  auto abort_if_diverged = [&](double value, int step) {
    if (std::abs(value) > 1e6) {
      res.aborted = true;
      res.abort_reason = "objective " + std::to_string(value) + " diverged at step " + std::to_string(step);
    }
    return res.aborted;
  };

  for (int step = 0; step < cfg.steps; ++step) {
    for (int k = 0; k < cfg.disc_steps_per_gen_step; ++k) {
      const Matrix real = detail::real_batch(target, dim, cfg.batch_size, data);
      const auto noise = detail::noise_batches(mix, cfg.batch_size, data);
      const ObjectiveResult r =
          mixgan_objective(mix, real, noise, cfg.entropy_weight, GradientSide::discriminator, cfg.non_saturating);
      if (abort_if_diverged(r.value, step)) break;
      for (int j = 0; j < mix.disc_count(); ++j) {
        disc_adam[j].step(disc_params[j], -r.disc_grads[j]);
        mix.discriminators[j].set_params(disc_params[j]);
      }
      // Maximiser of payoff - lambda R.
      const Vector g = r.disc_logit_payoff_grad - cfg.entropy_weight * r.disc_logit_entropy_grad;
      disc_logit_adam.step(mix.disc_logweights, -g);
    }
    if (res.aborted) break;

    const Matrix real = detail::real_batch(target, dim, cfg.batch_size, data);
    const auto noise = detail::noise_batches(mix, cfg.batch_size, data);
    const ObjectiveResult r =
        mixgan_objective(mix, real, noise, cfg.entropy_weight, GradientSide::generator, cfg.non_saturating);
    if (abort_if_diverged(r.value, step)) break;
    for (int i = 0; i < mix.gen_count(); ++i) {
      gen_adam[i].step(gen_params[i], r.gen_grads[i]);
      mix.generators[i].set_params(gen_params[i]);
    }
    gen_logit_adam.step(mix.gen_logweights, r.gen_logit_grad());
    res.steps_completed = step + 1;

    if (cfg.eval_every > 0 && (step + 1) % cfg.eval_every == 0) res.log.push_back(evaluate(mix, cfg, step + 1, r.value));
  }
  return res;
}

/// Weighted generator-side epsilon: best challenger objective
///   sum_i w_i E[phi(D(x))] + E_{G_i}[phi(1 - D)] - 2 phi(1/2)
/// against the frozen mixture, with `per_generator` samples from each
/// component carrying weight w_i / per_generator.
inline double equilibrium_check(const GanMixture& mix, const EmpiricalDistribution& target_sample,
                                const std::vector<Index>& challenger_dims, int budget, std::uint64_t seed,
                                Index per_generator = 1000, const div::NnDistanceOptions& opts = {}) {
  if (per_generator < 1) throw std::invalid_argument("equilibrium_check: per_generator must be >= 1");
  Rng rng(derive_seed(seed, 3));
  const Vector w = mix.gen_weights();
  const Index n = per_generator * mix.gen_count();
  div::WeightedSamples fake{Matrix(mix.data_dim(), n), Vector(n)};
  for (int i = 0; i < mix.gen_count(); ++i) {
    fake.points.middleCols(i * per_generator, per_generator) =
        mix.generators[i].forward_batch(gaussian_noise(mix.noise_dim(), per_generator, rng));
    fake.weights.segment(i * per_generator, per_generator).setConstant(w[i] / static_cast<double>(per_generator));
  }
  const div::DistanceEstimate est = div::nn_distance_weighted(
      mix.phi, div::WeightedSamples::uniform(target_sample), fake, challenger_dims, budget, seed, opts);
  return est.value;
}

}  // namespace ganlab::mixgan
