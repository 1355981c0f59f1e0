#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ganlab/core/random.hpp"
#include "ganlab/nn/lipschitz.hpp"
#include "ganlab/nn/net.hpp"
#include "ganlab/nn/serialize.hpp"

namespace ganlab::folding {

using nn::Activation;
using nn::Index;
using nn::Matrix;
using nn::MultilayerNet;
using nn::Vector;

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Quantiles z_i = Phi^-1(i/T), i = 1..T-1, by bisection to 1e-12.
inline std::vector<double> gaussian_equal_mass_cuts(int T) {
  if (T < 2) throw std::invalid_argument("gaussian_equal_mass_cuts: T must be >= 2");
  std::vector<double> cuts;
  for (int i = 1; i < T; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(T);
    double lo = -40.0, hi = 40.0;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (standard_normal_cdf(mid) < p ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  return cuts;
}

struct StepNetSpec {
  std::vector<double> cuts;  // strictly increasing
  double ramp_width = 0.0;

  void validate() const {
    if (cuts.empty()) throw std::invalid_argument("StepNetSpec: need at least one cut");
    if (!(ramp_width > 0.0)) throw std::invalid_argument("StepNetSpec: ramp width must be positive");
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      if (!(cuts[i] > cuts[i - 1])) throw std::invalid_argument("StepNetSpec: cuts must increase strictly");
      if (!(ramp_width < cuts[i] - cuts[i - 1]))
        throw std::invalid_argument("StepNetSpec: ramp width must be below the smallest cut gap");
    }
  }
};

namespace detail {

// Ramp units on a scalar input column `col` of a weight matrix: row r gets
// A_i = relu(h/w - z_i/w + 1/2), row r + q gets B_i = relu(h/w - z_i/w - 1/2),
// so f_i = A_i - B_i rises from 0 to 1 across [z_i - w/2, z_i + w/2].
inline void write_ramp_units(Matrix& W, Vector& b, Index row, Index col, const StepNetSpec& spec) {
  const Index q = static_cast<Index>(spec.cuts.size());
  const double inv = 1.0 / spec.ramp_width;
  for (Index i = 0; i < q; ++i) {
    const double z = spec.cuts[static_cast<std::size_t>(i)] * inv;
    W(row + i, col) = inv;
    b[row + i] = -z + 0.5;
    W(row + q + i, col) = inv;
    b[row + q + i] = -z - 0.5;
  }
}

// Coefficients of x_t - 1 as c0 + sum_i c_i f_i (t zero-based, q = T - 1):
// x_0 = 1 - f_0, x_t = f_{t-1} - f_t, x_q = f_{q-1}.
inline std::pair<double, std::vector<double>> selector_minus_one(int t, int q) {
  std::vector<double> c(static_cast<std::size_t>(q), 0.0);
  double c0 = -1.0;
  if (t == 0) {
    c0 = 0.0;
    c[0] = -1.0;
  } else {
    c[static_cast<std::size_t>(t - 1)] = 1.0;
    if (t < q) c[static_cast<std::size_t>(t)] = -1.0;
  }
  return {c0, c};
}

}  // namespace detail

/// Two-layer ReLU net R -> R^{q+1}: outputs sum to 1 for every h and the
/// i-th output is 1 on [z_{i-1} + w/2, z_i - w/2].
inline MultilayerNet build_step_net(const StepNetSpec& spec) {
  spec.validate();
  const Index q = static_cast<Index>(spec.cuts.size());
  MultilayerNet net({1, 2 * q, q + 1}, Activation::identity);
  detail::write_ramp_units(net.weight(0), net.bias(0), 0, 0, spec);
  Matrix& W = net.weight(1);
  Vector& b = net.bias(1);
  for (int t = 0; t <= q; ++t) {
    const auto [c0, c] = detail::selector_minus_one(t, static_cast<int>(q));
    b[t] = c0 + 1.0;
    for (Index i = 0; i < q; ++i) {
      W(t, i) = c[static_cast<std::size_t>(i)];
      W(t, q + i) = -c[static_cast<std::size_t>(i)];
    }
  }
  return net;
}

struct FoldOptions {
  /// Norm cap on the component noise used to bound pre-activations.
  double input_norm_cap = 10.0;
  /// Per-component override of the disable magnitude; must not be below
  /// the pre-activation bound.
  std::optional<std::vector<double>> disable_magnitudes;
};

struct FoldedGenerator {
  MultilayerNet net;  // input (h0, h)
  int components = 1;
  std::vector<double> cuts;
  double ramp_width = 0.0;
  std::vector<double> disable_magnitudes;
  std::vector<double> output_bounds;
  Index noise_dim = 0;  // dim of h; the composite input has noise_dim + 1 coordinates
  Index component_param_count = 0;

  Index selector_index() const { return 0; }
  Index param_count() const { return net.param_count(); }

  /// Zero-based index of the branch the ideal mixture would use for h0.
  int ideal_component(double h0) const {
    return static_cast<int>(std::count_if(cuts.begin(), cuts.end(), [&](double z) { return z < h0; }));
  }

  bool in_ramp_band(double h0) const {
    for (double z : cuts)
      if (std::abs(h0 - z) < 0.5 * ramp_width) return true;
    return false;
  }

  /// Standard-normal mass of the ramp bands.
  double ramp_band_mass() const {
    double mass = 0.0;
    for (double z : cuts) mass += standard_normal_cdf(z + 0.5 * ramp_width) - standard_normal_cdf(z - 0.5 * ramp_width);
    return mass;
  }

  Vector draw(Rng& rng) const {
    Vector x(net.input_dim());
    for (Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
    return net.forward(x);
  }
};

namespace detail {

inline void check_components(const std::vector<MultilayerNet>& comps) {
  if (comps.empty()) throw std::invalid_argument("fold: need at least one component");
  const auto& dims = comps.front().layer_dims();
  if (dims.size() < 3) throw std::invalid_argument("fold: components need at least two affine layers");
  for (const auto& c : comps) {
    if (c.layer_dims() != dims) throw std::invalid_argument("fold: components must share one architecture");
    if (c.output_activation() != Activation::relu)
      throw std::invalid_argument("fold: components must end in a ReLU layer");
  }
}

}  // namespace detail

/// Per-component bound on the largest last-layer pre-activation for noise
/// with norm <= input_norm_cap.
inline double output_preactivation_bound(const MultilayerNet& c, double input_norm_cap) {
  return nn::preactivation_norm_bounds(c, input_norm_cap).back();
}

/// Builds the composite network without validating the disable magnitudes.
inline FoldedGenerator fold_unchecked(const std::vector<MultilayerNet>& comps, double ramp_width,
                                      const std::vector<double>& magnitudes) {
  detail::check_components(comps);
  const int T = static_cast<int>(comps.size());
  if (static_cast<int>(magnitudes.size()) != T)
    throw std::invalid_argument("fold: need one disable magnitude per component");
  const std::vector<Index>& cd = comps.front().layer_dims();
  const std::size_t L = cd.size() - 1;  // component affine layers
  const Index l = cd.front();
  const Index out = cd.back();
  const Index q = T - 1;
  const Index s = 2 * q;  // step units carried in front of every hidden layer

  FoldedGenerator fg;
  fg.components = T;
  fg.ramp_width = ramp_width;
  fg.disable_magnitudes = magnitudes;
  fg.noise_dim = l;
  fg.component_param_count = comps.front().param_count();
  StepNetSpec spec;
  if (T >= 2) {
    fg.cuts = gaussian_equal_mass_cuts(T);
    spec = {fg.cuts, ramp_width};
    spec.validate();
  }

  std::vector<Index> dims{l + 1};
  for (std::size_t k = 1; k < L; ++k) dims.push_back(s + T * cd[k]);
  dims.push_back(T * out);
  dims.push_back(out);
  MultilayerNet net(dims, Activation::identity);

  for (std::size_t k = 0; k < L; ++k) {
    Matrix& W = net.weight(k);
    Vector& b = net.bias(k);
    const bool first = k == 0;
    const bool last = k + 1 == L;
    const Index row0 = last ? 0 : s;
    const Index col0 = first ? 1 : s;
    if (first && T >= 2) detail::write_ramp_units(W, b, 0, 0, spec);
    if (!first && !last)
      for (Index i = 0; i < s; ++i) W(i, i) = 1.0;  // nonnegative units pass through ReLU unchanged
    const Index rows = cd[k + 1], cols = cd[k];
    for (int t = 0; t < T; ++t) {
      const Index r = row0 + t * rows;
      const Index c = first ? col0 : col0 + t * cols;
      W.block(r, c, rows, cols) = comps[t].weight(k);
      b.segment(r, rows) = comps[t].bias(k);
      if (last && T >= 2) {
        // pre += M_t (x_t - 1): zero on branch t's plateau, -M_t elsewhere.
        const auto [c0, cf] = detail::selector_minus_one(t, static_cast<int>(q));
        const double M = magnitudes[static_cast<std::size_t>(t)];
        for (Index i = 0; i < q; ++i) {
          W.block(r, i, rows, 1).array() += M * cf[static_cast<std::size_t>(i)];
          W.block(r, q + i, rows, 1).array() -= M * cf[static_cast<std::size_t>(i)];
        }
        b.segment(r, rows).array() += M * c0;
      }
    }
  }
  Matrix& S = net.weight(L);
  for (int t = 0; t < T; ++t) S.block(0, t * out, out, out) = Matrix::Identity(out, out);
  fg.net = std::move(net);
  return fg;
}

/// Folds T components (shared architecture, ReLU last layer) into one net on
/// (h0, h) whose output is the h0-selected component's output outside the
/// ramp bands. The ramp width is delta_tv / (100 T).
inline FoldedGenerator fold(const std::vector<MultilayerNet>& comps, double delta_tv, const FoldOptions& opts = {}) {
  detail::check_components(comps);
  if (!(delta_tv > 0.0)) throw std::invalid_argument("fold: delta_tv must be positive");
  const int T = static_cast<int>(comps.size());
  std::vector<double> bounds, mags;
  for (const auto& c : comps) {
    bounds.push_back(output_preactivation_bound(c, opts.input_norm_cap));
    mags.push_back(2.0 * bounds.back());
  }
  if (opts.disable_magnitudes) {
    if (static_cast<int>(opts.disable_magnitudes->size()) != T)
      throw std::invalid_argument("fold: need one disable magnitude per component");
    for (int t = 0; t < T; ++t) {
      const double m = (*opts.disable_magnitudes)[static_cast<std::size_t>(t)];
      if (!(m >= bounds[static_cast<std::size_t>(t)]))
        throw std::invalid_argument("fold: disable magnitude " + std::to_string(m) + " for component " +
                                    std::to_string(t) + " is below its output bound " +
                                    std::to_string(bounds[static_cast<std::size_t>(t)]));
    }
    mags = *opts.disable_magnitudes;
  }
  FoldedGenerator fg = fold_unchecked(comps, delta_tv / (100.0 * T), mags);
  fg.output_bounds = std::move(bounds);
  return fg;
}

/// Fraction of n probes (h0, h) ~ N(0, I) on which the folded output differs
/// by more than 1e-6 from the output of the component the ideal mixture
/// would select.
inline double tv_defect(const FoldedGenerator& fg, const std::vector<MultilayerNet>& comps, Index n,
                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("tv_defect: n must be >= 1");
  if (static_cast<int>(comps.size()) != fg.components) throw std::invalid_argument("tv_defect: component count mismatch");
  Rng rng(seed);
  Matrix probes(fg.net.input_dim(), n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < probes.rows(); ++i) probes(i, j) = rng.normal();
  const Matrix folded = fg.net.forward_batch(probes);
  std::vector<Matrix> ideal;
  for (const auto& c : comps) ideal.push_back(c.forward_batch(probes.bottomRows(fg.noise_dim)));
  Index bad = 0;
  for (Index j = 0; j < n; ++j) {
    const int t = fg.ideal_component(probes(0, j));
    if ((folded.col(j) - ideal[static_cast<std::size_t>(t)].col(j)).cwiseAbs().maxCoeff() > 1e-6) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(n);
}

/// Net [noise_dim, 1, d] emitting `point` (entries >= 0) for every input.
inline MultilayerNet constant_generator(const Vector& point, Index noise_dim) {
  if ((point.array() < 0.0).any())
    throw std::invalid_argument("constant_generator: ReLU output cannot emit negative coordinates");
  MultilayerNet g({noise_dim, 1, point.size()}, Activation::relu);
  g.bias(1) = point;
  return g;
}

/// Composite net plus a manifest block describing the construction.
inline nlohmann::json to_json(const FoldedGenerator& fg) {
  nlohmann::json j;
  j["net"] = nn::to_json(fg.net);
  j["manifest"] = {{"components", fg.components},
                   {"cuts", fg.cuts},
                   {"ramp_width", fg.ramp_width},
                   {"disable_magnitudes", fg.disable_magnitudes},
                   {"noise_dim", fg.noise_dim},
                   {"component_param_count", fg.component_param_count},
                   {"param_count", fg.param_count()}};
  return j;
}

}  // namespace ganlab::folding
