#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ganlab/core/stats.hpp"
#include "ganlab/dist/distributions.hpp"
#include "ganlab/div/nn_distance.hpp"
#include "ganlab/div/wasserstein.hpp"

namespace ganlab::div {

/// Two-sample distance estimator: (a, b, seed) -> value.
using DistanceFn =
    std::function<double(const dist::EmpiricalDistribution&, const dist::EmpiricalDistribution&, std::uint64_t)>;

inline DistanceFn nn_distance_fn(MeasuringFunction phi, std::vector<Index> disc_dims, int budget,
                                 NnDistanceOptions opts = {}) {
  return [=](const dist::EmpiricalDistribution& a, const dist::EmpiricalDistribution& b, std::uint64_t seed) {
    return nn_distance(phi, a, b, disc_dims, budget, seed, opts).value;
  };
}

inline DistanceFn wasserstein_fn() {
  return [](const dist::EmpiricalDistribution& a, const dist::EmpiricalDistribution& b, std::uint64_t) {
    return wasserstein_exact(a, b);
  };
}

struct GapRow {
  Index m = 0;
  int trial = 0;
  double train_estimate = 0.0;
  double population_estimate = 0.0;
  double gap = 0.0;
};

struct GapSummary {
  Index m = 0;
  double gap_mean = 0.0;
  double gap_std = 0.0;
  double gap_median = 0.0;
};

struct GapTable {
  std::vector<GapRow> rows;
  std::vector<GapSummary> summary;

  const GapSummary& at(Index m) const {
    for (const auto& s : summary)
      if (s.m == m) return s;
    throw std::out_of_range("no gap summary for m = " + std::to_string(m));
  }
};

struct GapOptions {
  int trials = 5;
  /// Fresh empiricals of size population_factor * m stand in for the populations.
  double population_factor = 10.0;
  /// Use a known population distance instead of the fresh-sample stand-in.
  /// Needed for distances whose empirical versions do not converge.
  std::optional<double> known_population_distance;
};

/// For each m: gap = |d(train empiricals of size m) - d(population stand-in)|,
/// aggregated over trials.
template <dist::PointSampler Target, dist::PointSampler Gen>
GapTable generalization_gap(const Target& target, const Gen& gen, const std::vector<Index>& m_values,
                            const DistanceFn& distance, std::uint64_t seed, const GapOptions& opts = {}) {
  if (m_values.empty()) throw std::invalid_argument("generalization_gap: m_values must be nonempty");
  if (opts.trials < 1) throw std::invalid_argument("generalization_gap: trials must be >= 1");
  GapTable table;
  for (std::size_t mi = 0; mi < m_values.size(); ++mi) {
    const Index m = m_values[mi];
    std::vector<double> gaps;
    for (int t = 0; t < opts.trials; ++t) {
      const std::uint64_t s = derive_seed(derive_seed(seed, mi), static_cast<std::uint64_t>(t));
      const auto a = dist::sample(target, m, derive_seed(s, 1));
      const auto b = dist::sample(gen, m, derive_seed(s, 2));
      GapRow row;
      row.m = m;
      row.trial = t;
      row.train_estimate = distance(a, b, derive_seed(s, 3));
      if (opts.known_population_distance) {
        row.population_estimate = *opts.known_population_distance;
      } else {
        const auto big = static_cast<Index>(std::llround(opts.population_factor * static_cast<double>(m)));
        const auto pa = dist::sample(target, big, derive_seed(s, 4));
        const auto pb = dist::sample(gen, big, derive_seed(s, 5));
        row.population_estimate = distance(pa, pb, derive_seed(s, 6));
      }
      row.gap = std::abs(row.train_estimate - row.population_estimate);
      gaps.push_back(row.gap);
      table.rows.push_back(row);
    }
    table.summary.push_back({m, mean(gaps), sample_stddev(gaps), median(gaps)});
  }
  return table;
}

/// Convenience form with the neural-net distance.
template <dist::PointSampler Target, dist::PointSampler Gen>
GapTable generalization_gap(const Target& target, const Gen& gen, const std::vector<Index>& m_values,
                            const std::vector<Index>& disc_dims, const MeasuringFunction& phi, int trials,
                            std::uint64_t seed, int budget, const NnDistanceOptions& nn_opts = {}) {
  GapOptions opts;
  opts.trials = trials;
  return generalization_gap(target, gen, m_values, nn_distance_fn(phi, disc_dims, budget, nn_opts), seed, opts);
}

struct DiversityRow {
  Index m = 0;
  int trial = 0;
  double estimate = 0.0;
};

struct DiversitySummary {
  Index m = 0;
  double median = 0.0;
  double mean = 0.0;
};

struct DiversityTable {
  std::vector<DiversityRow> rows;
  std::vector<DiversitySummary> summary;
};

struct DiversityOptions {
  int trials = 5;
  double population_factor = 10.0;
  Index min_population = 2000;
  NnDistanceOptions nn;
};

/// Estimates d_F(target, uniform over m samples of target) for each support
/// size m. The target side is a fresh sample of max(min_population,
/// population_factor * m) points.
template <dist::PointSampler Target>
DiversityTable diversity_probe(const Target& target, const std::vector<Index>& support_sizes,
                               const std::vector<Index>& disc_dims, const MeasuringFunction& phi, int budget,
                               std::uint64_t seed, const DiversityOptions& opts = {}) {
  if (support_sizes.empty()) throw std::invalid_argument("diversity_probe: support_sizes must be nonempty");
  DiversityTable table;
  for (std::size_t mi = 0; mi < support_sizes.size(); ++mi) {
    const Index m = support_sizes[mi];
    std::vector<double> values;
    for (int t = 0; t < opts.trials; ++t) {
      const std::uint64_t s = derive_seed(derive_seed(seed, 1000 + mi), static_cast<std::uint64_t>(t));
      const auto support = dist::sample(target, m, derive_seed(s, 1));
      const Index big = std::max(opts.min_population,
                                 static_cast<Index>(std::llround(opts.population_factor * static_cast<double>(m))));
      const auto population = dist::sample(target, big, derive_seed(s, 2));
      const double est = nn_distance(phi, population, support, disc_dims, budget, derive_seed(s, 3), opts.nn).value;
      values.push_back(est);
      table.rows.push_back({m, t, est});
    }
    table.summary.push_back({m, median(values), mean(values)});
  }
  return table;
}

}  // namespace ganlab::div
