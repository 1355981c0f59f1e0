#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/core/error.hpp"
#include "ganlab/core/random.hpp"
#include "ganlab/core/stats.hpp"
#include "ganlab/dist/distributions.hpp"

namespace ganlab::div {

using dist::EmpiricalDistribution;
using dist::Index;
using dist::Vector;

/// JS divergence between an absolutely continuous law and a finitely
/// supported one. The supports differ on a set of full measure for the
/// continuous law, so the value is log 2 exactly.
inline double js_continuous_vs_empirical(const dist::ScaledGaussian&, const EmpiricalDistribution&) {
  return std::log(2.0);
}

inline double js_continuous_vs_empirical() { return std::log(2.0); }

/// Exact JS divergence between two empirical distributions, treating
/// identical rows as the same atom.
inline double js_divergence_discrete(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("js_divergence_discrete: dimension mismatch");
  std::map<std::vector<double>, std::pair<double, double>> atoms;
  auto add = [&](const EmpiricalDistribution& e, bool first) {
    const double w = 1.0 / static_cast<double>(e.size());
    for (Index i = 0; i < e.size(); ++i) {
      std::vector<double> key(static_cast<std::size_t>(e.dim()));
      for (Index j = 0; j < e.dim(); ++j) key[static_cast<std::size_t>(j)] = e.samples()(i, j);
      auto& slot = atoms[key];
      (first ? slot.first : slot.second) += w;
    }
  };
  add(a, true);
  add(b, false);
  double js = 0.0;
  for (const auto& [key, pq] : atoms) {
    const auto [p, q] = pq;
    const double mid = 0.5 * (p + q);
    if (p > 0.0) js += 0.5 * p * std::log(p / mid);
    if (q > 0.0) js += 0.5 * q * std::log(q / mid);
  }
  return js;
}

template <class D>
concept DensitySampler = requires(const D& d, const Vector& x, Rng& rng) {
  { d.log_density(x) } -> std::convertible_to<double>;
  { d.draw(rng) } -> std::convertible_to<Vector>;
};

struct JsEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  Index samples_per_side = 0;
};

/// Monte Carlo JS estimate
///   1/2 E_{rho1}[log(2 rho1 / (rho1 + rho2))] + 1/2 E_{rho2}[log(2 rho2 / (rho1 + rho2))]
/// with n draws from each side. Densities are handled in log space.
template <DensitySampler A, DensitySampler B>
JsEstimate js_monte_carlo(const A& rho1, const B& rho2, Index n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("js_monte_carlo: n must be >= 2");
  auto log_ratio = [](double lself, double lother) {
    if (!std::isfinite(lself) || !std::isfinite(lother))
      throw NumericalError("js_monte_carlo: nonpositive or non-finite density encountered");
    // log(2 p / (p + q)) = log 2 - log1p(q / p), never above log 2.
    const double d = lother - lself;
    return d > 0.0 ? std::numbers::ln2 - d - std::log1p(std::exp(-d)) : std::numbers::ln2 - std::log1p(std::exp(d));
  };
  RunningStats s1, s2;
  Rng r1(derive_seed(seed, 1)), r2(derive_seed(seed, 2));
  for (Index i = 0; i < n; ++i) {
    const Vector x = rho1.draw(r1);
    s1.push(log_ratio(rho1.log_density(x), rho2.log_density(x)));
    const Vector y = rho2.draw(r2);
    s2.push(log_ratio(rho2.log_density(y), rho1.log_density(y)));
  }
  JsEstimate out;
  out.value = 0.5 * s1.mean() + 0.5 * s2.mean();
  out.standard_error = 0.5 * std::sqrt(s1.variance() / static_cast<double>(n) + s2.variance() / static_cast<double>(n));
  out.samples_per_side = n;
  return out;
}

}  // namespace ganlab::div
