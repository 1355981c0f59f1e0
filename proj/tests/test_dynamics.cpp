#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ganlab/dynamics/best_response.hpp"

using namespace ganlab::dynamics;

namespace {

constexpr double pi = std::numbers::pi;

BestResponseTrace trace_of(const std::vector<double>& thetas) {
  BestResponseTrace tr;
  for (double t : thetas) tr.records.push_back({{t}, {t}, 0.0, 0.0, 0.0});
  return tr;
}

}  // namespace

TEST(Angles, Distance) {
  EXPECT_EQ(angular_distance(0, 0), 0.0);
  EXPECT_NEAR(angular_distance(0, pi), pi, 1e-15);
  EXPECT_NEAR(angular_distance(0.1, 2 * pi - 0.1), 0.2, 1e-12);
  EXPECT_NEAR(angular_distance(-0.1, 0.1), 0.2, 1e-12);
  EXPECT_NEAR(angular_distance(7 * pi, 0), pi, 1e-12);
  for (double a = -10; a < 10; a += 0.37)
    for (double b = -10; b < 10; b += 0.41) {
      const double d = angular_distance(a, b);
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, pi + 1e-12);
      EXPECT_EQ(d, angular_distance(b, a));
    }
}

TEST(Angles, TrueExpectationIsThreeTermAverage) {
  for (double p = 0; p < two_pi; p += 0.3) {
    const double want = (bump(0, p) + bump(two_pi / 3, p) + bump(2 * two_pi / 3, p)) / 3;
    EXPECT_NEAR(true_expectation(p), want, 1e-15);
  }
}

TEST(Grid, TiesGoToSmallestAngle) {
  // Two equal maxima at pi/2 and 3pi/2.
  const double x = grid_argmax([](double t) { return std::abs(std::sin(t)); }, 4);
  EXPECT_NEAR(x, pi / 2, 1e-15);
}

TEST(Grid, RefinementMovesArgmaxByLessThanACell) {
  const CircleGan1 s{0.0, 0.0, 10000};
  auto f = [&](double p) { return disc_value_1(s.theta, p); };
  const double coarse = grid_argmax(f, 10000), fine = grid_argmax(f, 100000);
  EXPECT_LT(angular_distance(coarse, fine), two_pi / 10000);
}

TEST(Example1, FirstStepFromZero) {
  const CircleGan1 start{0.0, 0.0, 100000};
  auto f = [&](double p) { return disc_value_1(start.theta, p); };
  const double phi = grid_argmax(f, start.resolution);
  EXPECT_LE(bump(0.0, phi), 0.001);
  // The grid point sits within half a cell of 2pi/3; allow that much mass.
  EXPECT_GE(true_expectation(phi), 1.0 / 3 - 1e-6);
  const CircleGan1 next = best_response_step_1(start);
  EXPECT_EQ(next.phi, phi);
  EXPECT_EQ(next.theta, next.phi);
  EXPECT_EQ(bump(next.theta, next.phi), 1.0);
}

TEST(Example1, NeverConverges) {
  const auto tr = run_example_1(50);
  ASSERT_EQ(tr.records.size(), 51u);
  double worst = 1.0;
  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    const auto& r = tr.records[i];
    EXPECT_EQ(r.theta[0], r.phi[0]);
    EXPECT_EQ(r.d_at_theta, 1.0);
    worst = std::min(worst, std::abs(r.d_at_theta - r.d_prev_at_theta));
  }
  EXPECT_GE(worst, 0.25);
  EXPECT_NE(detect_cycle(tr, 0.05).verdict, "converged");
}

TEST(Example1, RejectsCoarseGrid) { EXPECT_THROW(best_response_step_1({0.0, 0.0, 999}), std::invalid_argument); }

TEST(Example2, FirstDiscriminatorAvoidsGenerator) {
  const CircleGan2 next = best_response_step_2(CircleGan2{});
  for (double p : next.phi) {
    const bool near = angular_distance(p, two_pi / 3) <= 0.05 || angular_distance(p, 2 * two_pi / 3) <= 0.05;
    EXPECT_TRUE(near) << p;
  }
}

TEST(Example2, GeneratorPointsCoincideAndHop) {
  const auto tr = run_example_2(50);
  ASSERT_EQ(tr.records.size(), 51u);
  int prev = nearest_true_point(tr.records[0].theta[0]);
  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    const auto& th = tr.records[i].theta;
    EXPECT_EQ(th[0], th[1]);
    EXPECT_EQ(th[1], th[2]);
    const int k = nearest_true_point(th[0]);
    EXPECT_LE(angular_distance(th[0], true_points()[static_cast<std::size_t>(k)]), 0.1);
    EXPECT_NE(k, prev) << "iteration " << i;
    prev = k;
  }
}

TEST(Example2, Cycles) {
  const auto tr = run_example_2(50);
  const auto v = detect_cycle(tr, 0.05);
  EXPECT_EQ(v.verdict, "cycling");
  EXPECT_GE(v.period, 2);
}

TEST(Example2, Deterministic) {
  const auto a = run_example_2(10), b = run_example_2(10);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].theta, b.records[i].theta);
    EXPECT_EQ(a.records[i].phi, b.records[i].phi);
  }
}

TEST(Cycle, SyntheticVerdicts) {
  EXPECT_EQ(detect_cycle(trace_of(std::vector<double>(10, 1.0)), 0.05).verdict, "converged");
  std::vector<double> alt;
  for (int i = 0; i < 12; ++i) alt.push_back(i % 2 ? 2.0 : 0.0);
  const auto v = detect_cycle(trace_of(alt), 0.05);
  EXPECT_EQ(v.verdict, "cycling");
  EXPECT_EQ(v.period, 2);
  std::vector<double> drift;
  for (int i = 0; i < 12; ++i) drift.push_back(0.3 * i);
  EXPECT_EQ(detect_cycle(trace_of(drift), 0.05).verdict, "inconclusive");
  EXPECT_THROW(detect_cycle(trace_of({0.0, 1.0, 2.0}), 0.05), std::invalid_argument);
}
