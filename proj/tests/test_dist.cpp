#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ganlab/dist/csv_io.hpp"
#include "ganlab/dist/distributions.hpp"

using namespace ganlab;
using namespace ganlab::dist;

TEST(Sample, UnitNormGaussianSquaredNorm) {
  const auto emp = sample(ScaledGaussian::unit_norm(100), 10000, 1);
  ASSERT_EQ(emp.size(), 10000);
  ASSERT_EQ(emp.dim(), 100);
  const double msq = emp.samples().rowwise().squaredNorm().mean();
  EXPECT_GE(msq, 0.9);
  EXPECT_LE(msq, 1.1);
}

TEST(Sample, CirclePointFrequencies) {
  const auto emp = sample(CirclePointTarget{}, 30000, 2);
  std::vector<int> counts(3, 0);
  for (Index i = 0; i < emp.size(); ++i) {
    for (int k = 0; k < 3; ++k)
      if ((emp.row(i) - CirclePointTarget::point(k)).norm() < 1e-12) ++counts[static_cast<std::size_t>(k)];
  }
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 30000);
  for (int c : counts) EXPECT_NEAR(c / 30000.0, 1.0 / 3.0, 0.02);
}

TEST(Sample, SameSeedSameSample) {
  const RingTarget ring;
  EXPECT_EQ(sample(ring, 1, 9).samples(), sample(ring, 1, 9).samples());
  EXPECT_EQ(sample(ring, 500, 9).samples(), sample(ring, 500, 9).samples());
  EXPECT_NE(sample(ring, 5, 9).samples(), sample(ring, 5, 10).samples());
  EXPECT_THROW(sample(ring, 0, 1), std::invalid_argument);
}

TEST(Sample, GeneratorDistributionIsReproducible) {
  Rng rng(3);
  GeneratorDistribution g{nn::MultilayerNet::glorot_uniform({2, 8, 2}, nn::Activation::identity, rng)};
  const auto a = sample(g, 100, 4), b = sample(g, 100, 4);
  EXPECT_EQ(a.samples(), b.samples());
  EXPECT_EQ(a.dim(), 2);
}

TEST(Ring, ModeAssignmentsAreUniform) {
  const RingTarget ring;
  const Index n = 40000;
  const auto emp = sample(ring, n, 5);
  std::vector<int> counts(8, 0);
  for (Index i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(ring.nearest_mode(emp.row(i)))];
  const double p = 1.0 / 8, sd = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, n * p, 4 * sd);
}

TEST(Ring, DefaultsAndGeometry) {
  const RingTarget ring;
  EXPECT_EQ(ring.modes, 8);
  EXPECT_EQ(ring.radius, 2.0);
  EXPECT_EQ(ring.stddev, 0.05);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(ring.center(k).norm(), 2.0, 1e-12);
  EXPECT_NEAR((ring.center(0) - ring.center(1)).norm(), 2 * 2.0 * std::sin(std::numbers::pi / 8), 1e-12);
}

TEST(CirclePoints, Support) {
  const auto s = CirclePointTarget::support();
  EXPECT_EQ(s.size(), 3);
  double total = 0;
  for (int k = 0; k < 3; ++k) total += CirclePointTarget::weight(k);
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Gaussian, OneDimensionalDensityIntegratesToOne) {
  const ScaledGaussian g{1, 0.3, {}};
  const int n = 20000;
  const double lo = -10, hi = 10, h = (hi - lo) / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * g.density(Vector{{lo + i * h}});
  }
  EXPECT_NEAR(s * h, 1.0, 1e-6);
}

TEST(Smoothed, SinglePointAtOriginMatchesGaussian) {
  const EmpiricalDistribution emp(Matrix::Zero(1, 4));
  const auto sm = convolve_with_gaussian(emp, 0.5);
  const ScaledGaussian g{4, 0.25 / 4, {}};
  EXPECT_NEAR(sm.density(Vector::Zero(4)), g.density(Vector::Zero(4)), 1e-12 * g.density(Vector::Zero(4)));
}

TEST(Smoothed, DensityIntegratesToOneIn1D) {
  const double sigma = 0.4;
  const EmpiricalDistribution emp(Matrix{{-0.3}, {0.1}, {0.25}});
  const auto sm = convolve_with_gaussian(emp, sigma);
  const int n = 40000;
  const double lo = -0.3 - 10 * sigma, hi = 0.25 + 10 * sigma, h = (hi - lo) / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * sm.density(Vector{{lo + i * h}});
  }
  EXPECT_NEAR(s * h, 1.0, 1e-3);
}

TEST(Smoothed, SamplerMeanTracksRows) {
  Rng r(6);
  const auto base = sample(ScaledGaussian{3, 1.0, {}}, 20, 7);
  const double sigma = 0.3;
  const auto sm = convolve_with_gaussian(base, sigma);
  const Index n = 20000;
  const auto draws = sample(sm, n, 8);
  // Mean of draws vs mean of rows: row choice spread plus the added noise.
  const double row_sd = std::sqrt((base.samples().rowwise() - base.mean().transpose()).array().square().colwise().mean().maxCoeff());
  const double bound = 3 * std::sqrt(row_sd * row_sd + sigma * sigma / 3) / std::sqrt(static_cast<double>(n));
  EXPECT_LT((draws.mean() - base.mean()).cwiseAbs().maxCoeff(), bound);
}

TEST(Smoothed, DensityStrictlyPositiveFarAway) {
  const auto sm = convolve_with_gaussian(EmpiricalDistribution(Matrix::Zero(2, 2)), 0.1);
  EXPECT_GT(sm.density(Vector{{1.0, 1.0}}), 0.0);
  EXPECT_TRUE(std::isfinite(sm.log_density(Vector{{100.0, -100.0}})));
  EXPECT_THROW(convolve_with_gaussian(EmpiricalDistribution(Matrix::Zero(1, 1)), 0.0), std::invalid_argument);
  EXPECT_THROW(convolve_with_gaussian(EmpiricalDistribution(Matrix::Zero(1, 1)), -1.0), std::invalid_argument);
}

TEST(Smoothing, DefaultSigma) { EXPECT_NEAR(default_smoothing_sigma(100), 0.2 / std::sqrt(std::log(100.0)), 1e-15); }

TEST(Nearest, HandExamples) {
  const EmpiricalDistribution emp(Matrix{{0, 0}, {3, 4}});
  EXPECT_EQ(nearest_sample_distance(emp, Vector{{3.0, 4.0}}), 0.0);
  EXPECT_EQ(nearest_sample_distance(emp, Vector{{0.0, 1.0}}), 1.0);
  EXPECT_THROW(nearest_sample_distance(emp, Vector::Zero(3)), std::invalid_argument);
}

TEST(Empirical, RejectsEmpty) { EXPECT_THROW(EmpiricalDistribution(Matrix(0, 2)), std::invalid_argument); }

TEST(EmpiricalCsv, RoundTripIsExact) {
  const auto emp = sample(ScaledGaussian{3, 2.0, {}}, 50, 12);
  std::stringstream s;
  write_csv(emp, s);
  const auto back = read_csv(s);
  EXPECT_EQ(back.samples(), emp.samples());
}
