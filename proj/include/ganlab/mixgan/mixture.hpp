#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/core/error.hpp"
#include "ganlab/core/random.hpp"
#include "ganlab/div/measuring.hpp"
#include "ganlab/nn/net.hpp"

namespace ganlab::mixgan {

using div::MeasuringFunction;
using nn::Index;
using nn::Matrix;
using nn::MultilayerNet;
using nn::Vector;

/// Softmax with max subtraction.
inline Vector mixture_weights(const Vector& logits) {
  if (logits.size() < 1) throw std::invalid_argument("mixture_weights: need at least one logit");
  const double top = logits.maxCoeff();
  Vector w = (logits.array() - top).exp().matrix();
  return w / w.sum();
}

struct MixtureArch {
  std::vector<Index> gen_dims;   // noise dim first
  std::vector<Index> disc_dims;  // data dim first, output 1
  nn::Activation gen_output = nn::Activation::identity;
  nn::Activation disc_output = nn::Activation::sigmoid;
  int generators = 1;
  int discriminators = 1;
};

/// T generators and T_d discriminators with trainable log-weights.
struct GanMixture {
  std::vector<MultilayerNet> generators;
  std::vector<MultilayerNet> discriminators;
  Vector gen_logweights;
  Vector disc_logweights;
  MeasuringFunction phi = MeasuringFunction::linear();

  static GanMixture initialized(const MixtureArch& arch, const MeasuringFunction& phi, Rng& rng) {
    if (arch.generators < 1 || arch.discriminators < 1)
      throw std::invalid_argument("GanMixture: need at least one generator and one discriminator");
    GanMixture mix;
    mix.phi = phi;
    for (int i = 0; i < arch.generators; ++i)
      mix.generators.push_back(MultilayerNet::glorot_uniform(arch.gen_dims, arch.gen_output, rng));
    for (int j = 0; j < arch.discriminators; ++j)
      mix.discriminators.push_back(MultilayerNet::glorot_uniform(arch.disc_dims, arch.disc_output, rng));
    mix.gen_logweights = Vector::Zero(arch.generators);
    mix.disc_logweights = Vector::Zero(arch.discriminators);
    mix.validate();
    return mix;
  }

  int gen_count() const { return static_cast<int>(generators.size()); }
  int disc_count() const { return static_cast<int>(discriminators.size()); }
  Index noise_dim() const { return generators.front().input_dim(); }
  Index data_dim() const { return generators.front().output_dim(); }
  Vector gen_weights() const { return mixture_weights(gen_logweights); }
  Vector disc_weights() const { return mixture_weights(disc_logweights); }

  void validate() const {
    if (generators.empty() || discriminators.empty())
      throw std::invalid_argument("GanMixture: empty generator or discriminator set");
    for (const auto& g : generators)
      if (g.layer_dims() != generators.front().layer_dims() ||
          g.output_activation() != generators.front().output_activation())
        throw std::invalid_argument("GanMixture: generators must share one architecture");
    for (const auto& d : discriminators) {
      if (d.layer_dims() != discriminators.front().layer_dims() ||
          d.output_activation() != discriminators.front().output_activation())
        throw std::invalid_argument("GanMixture: discriminators must share one architecture");
      if (d.output_dim() != 1) throw std::invalid_argument("GanMixture: discriminators need one output");
    }
    if (discriminators.front().input_dim() != generators.front().output_dim())
      throw std::invalid_argument("GanMixture: discriminator input dim must equal generator output dim");
    if (gen_logweights.size() != gen_count() || disc_logweights.size() != disc_count())
      throw std::invalid_argument("GanMixture: log-weight count mismatch");
  }
};

namespace detail {

inline void check_unit_interval(const Matrix& outputs) {
  for (Index k = 0; k < outputs.cols(); ++k) {
    const double d = outputs(0, k);
    if (!(d >= 0.0 && d <= 1.0))
      throw std::domain_error("payoff: discriminator output " + std::to_string(d) + " outside [0, 1]");
  }
}

// Running mean of phi(D) or phi(1 - D) over columns.
inline double phi_mean(const MeasuringFunction& phi, const Matrix& outputs, bool complement) {
  check_unit_interval(outputs);
  double mean = 0.0;
  for (Index k = 0; k < outputs.cols(); ++k) {
    const double d = outputs(0, k);
    mean += (phi.value(complement ? 1.0 - d : d) - mean) / static_cast<double>(k + 1);
  }
  return mean;
}

}  // namespace detail

/// Empirical payoff E_real[phi(D(x))] + E_h[phi(1 - D(G(h)))].
/// Batches hold one sample per column.
inline double payoff(const MultilayerNet& gen, const MultilayerNet& disc, const MeasuringFunction& phi,
                     const Matrix& real_batch, const Matrix& noise_batch) {
  if (real_batch.cols() < 1 || noise_batch.cols() < 1) throw std::invalid_argument("payoff: empty batch");
  const double real_term = detail::phi_mean(phi, disc.forward_batch(real_batch), false);
  const double fake_term = detail::phi_mean(phi, disc.forward_batch(gen.forward_batch(noise_batch)), true);
  return real_term + fake_term;
}

/// -(1/T) sum_i log w_u,i - (1/T_d) sum_j log w_v,j. Equals 2 log T at
/// uniform weights when T_d = T, its minimum.
inline double entropy_regularizer(const Vector& gen_logits, const Vector& disc_logits) {
  auto part = [](const Vector& logits) {
    const double top = logits.maxCoeff();
    const double lse = top + std::log((logits.array() - top).exp().sum());
    return -(logits.array() - lse).mean();
  };
  return part(gen_logits) + part(disc_logits);
}

enum class GradientSide { none, generator, discriminator, both };

struct ObjectiveResult {
  Matrix payoffs;  // T x T_d, entry (i, j) = F(u_i, v_j)
  double payoff_term = 0.0;
  double entropy_term = 0.0;
  double value = 0.0;  // payoff_term + entropy_weight * entropy_term
  std::vector<Vector> gen_grads;   // d value / d u_i
  std::vector<Vector> disc_grads;  // d value / d v_j
  Vector gen_logit_payoff_grad;    // d payoff_term / d alpha_u
  Vector disc_logit_payoff_grad;   // d payoff_term / d alpha_v
  Vector gen_logit_entropy_grad;   // d entropy_term / d alpha_u
  Vector disc_logit_entropy_grad;  // d entropy_term / d alpha_v
  double entropy_weight = 0.0;

  Vector gen_logit_grad() const { return gen_logit_payoff_grad + entropy_weight * gen_logit_entropy_grad; }
  Vector disc_logit_grad() const { return disc_logit_payoff_grad + entropy_weight * disc_logit_entropy_grad; }
};

/// value = sum_ij w_u,i w_v,j F(u_i, v_j) + entropy_weight * R_ent, with
/// gradients for the requested side(s). Generator i uses noise_batches[i].
///
/// With `non_saturating`, generator-side gradients (u_i and alpha_u) are
/// taken of sum_ij w w E[-phi(D_j(G_i(h)))] + entropy_weight * R_ent instead;
/// the reported value is unchanged.
inline ObjectiveResult mixgan_objective(const GanMixture& mix, const Matrix& real_batch,
                                        const std::vector<Matrix>& noise_batches, double entropy_weight,
                                        GradientSide side = GradientSide::both, bool non_saturating = false) {
  const int T = mix.gen_count();
  const int Td = mix.disc_count();
  if (static_cast<int>(noise_batches.size()) != T)
    throw std::invalid_argument("mixgan_objective: need one noise batch per generator");
  if (real_batch.cols() < 1) throw std::invalid_argument("mixgan_objective: empty real batch");
  const MeasuringFunction& phi = mix.phi;
  const Vector wu = mix.gen_weights();
  const Vector wv = mix.disc_weights();
  const bool want_gen = side == GradientSide::generator || side == GradientSide::both;
  const bool want_disc = side == GradientSide::discriminator || side == GradientSide::both;

  ObjectiveResult out;
  out.entropy_weight = entropy_weight;
  out.payoffs.resize(T, Td);
  Matrix ns_payoffs(T, Td);  // sum of E[phi(D(x))] on real and E[-phi(D(G))] (non-saturating form)
  if (want_gen) out.gen_grads.assign(static_cast<std::size_t>(T), Vector());
  if (want_disc) out.disc_grads.assign(static_cast<std::size_t>(Td), Vector());
  for (int i = 0; i < T && want_gen; ++i) out.gen_grads[i] = Vector::Zero(mix.generators[i].param_count());
  for (int j = 0; j < Td && want_disc; ++j) out.disc_grads[j] = Vector::Zero(mix.discriminators[j].param_count());

  // Generator outputs.
  std::vector<MultilayerNet::Tape> gen_tapes(static_cast<std::size_t>(T));
  std::vector<Matrix> fakes(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i) fakes[i] = mix.generators[i].forward_batch(noise_batches[i], gen_tapes[i]);

  // Real-side terms, one per discriminator; sum_i w_u,i = 1.
  Vector real_terms(Td);
  for (int j = 0; j < Td; ++j) {
    const MultilayerNet& d = mix.discriminators[j];
    MultilayerNet::Tape tape;
    const Matrix out_real = d.forward_batch(real_batch, tape);
    real_terms[j] = detail::phi_mean(phi, out_real, false);
    if (want_disc) {
      Matrix cot(1, out_real.cols());
      const double scale = wv[j] / static_cast<double>(out_real.cols());
      for (Index k = 0; k < cot.cols(); ++k) cot(0, k) = scale * phi.derivative(out_real(0, k));
      d.backward_batch(tape, cot, out.disc_grads[j]);
    }
  }

  std::vector<Matrix> gen_input_cot(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i) {
    if (want_gen) gen_input_cot[i] = Matrix::Zero(fakes[i].rows(), fakes[i].cols());
    const double n = static_cast<double>(fakes[i].cols());
    for (int j = 0; j < Td; ++j) {
      const MultilayerNet& d = mix.discriminators[j];
      MultilayerNet::Tape tape;
      const Matrix out_fake = d.forward_batch(fakes[i], tape);
      const double fake_term = detail::phi_mean(phi, out_fake, true);
      out.payoffs(i, j) = real_terms[j] + fake_term;
      if (non_saturating) {
        double m = 0.0;
        for (Index k = 0; k < out_fake.cols(); ++k) m += (-phi.value(out_fake(0, k)) - m) / static_cast<double>(k + 1);
        ns_payoffs(i, j) = real_terms[j] + m;
      }
      const double scale = wu[i] * wv[j] / n;
      if (want_disc) {
        Matrix cot(1, out_fake.cols());
        for (Index k = 0; k < cot.cols(); ++k) cot(0, k) = -scale * phi.derivative(1.0 - out_fake(0, k));
        d.backward_batch(tape, cot, out.disc_grads[j]);
      }
      if (want_gen) {
        Matrix cot(1, out_fake.cols());
        for (Index k = 0; k < cot.cols(); ++k)
          cot(0, k) = non_saturating ? -scale * phi.derivative(out_fake(0, k))
                                     : -scale * phi.derivative(1.0 - out_fake(0, k));
        gen_input_cot[i] += d.input_cotangent(tape, cot);
      }
    }
    if (want_gen) mix.generators[i].backward_batch(gen_tapes[i], gen_input_cot[i], out.gen_grads[i]);
  }

  out.payoff_term = wu.dot(out.payoffs * wv);
  out.entropy_term = entropy_regularizer(mix.gen_logweights, mix.disc_logweights);
  out.value = out.payoff_term + entropy_weight * out.entropy_term;

  // Softmax chain rule: d(w^T a)/d alpha_k = w_k (a_k - w^T a).
  const Matrix& gen_side_payoffs = non_saturating ? ns_payoffs : out.payoffs;
  const Vector row_payoff = gen_side_payoffs * wv;
  const double gen_side_total = wu.dot(row_payoff);
  out.gen_logit_payoff_grad = wu.cwiseProduct((row_payoff.array() - gen_side_total).matrix());
  const Vector col_payoff = out.payoffs.transpose() * wu;
  out.disc_logit_payoff_grad = wv.cwiseProduct((col_payoff.array() - out.payoff_term).matrix());
  out.gen_logit_entropy_grad = (wu.array() - 1.0 / static_cast<double>(T)).matrix();
  out.disc_logit_entropy_grad = (wv.array() - 1.0 / static_cast<double>(Td)).matrix();

  if (want_gen)
    for (const auto& g : out.gen_grads)
      if (!g.allFinite()) throw NumericalError("mixgan_objective: non-finite generator gradient");
  if (want_disc)
    for (const auto& g : out.disc_grads)
      if (!g.allFinite()) throw NumericalError("mixgan_objective: non-finite discriminator gradient");
  if (!std::isfinite(out.value)) throw NumericalError("mixgan_objective: non-finite objective");
  return out;
}

}  // namespace ganlab::mixgan
