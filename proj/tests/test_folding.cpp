#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ganlab/folding/fold.hpp"
#include "ganlab/folding/pure_equilibrium.hpp"
#include "ganlab/nn/serialize.hpp"

using namespace ganlab;
using namespace ganlab::folding;
using nn::Activation;
using nn::Matrix;
using nn::MultilayerNet;
using nn::Vector;

namespace {

// Independent CDF via Simpson integration of the density from 0.
double cdf_by_quadrature(double z) {
  const int n = 20000;
  const double h = z / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    s += w * std::exp(-0.5 * x * x);
  }
  return 0.5 + s * h / 3 / std::sqrt(2 * std::numbers::pi);
}

std::vector<MultilayerNet> relu_components(int T, Index noise, Index hidden, Index out, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<MultilayerNet> comps;
  for (int t = 0; t < T; ++t) {
    auto c = MultilayerNet::glorot_uniform({noise, hidden, out}, Activation::relu, rng);
    c.bias(1).setConstant(0.5);  // keep some outputs active
    comps.push_back(std::move(c));
  }
  return comps;
}

Vector step_outputs(const MultilayerNet& net, double h) { return net.forward(Vector{{h}}); }

}  // namespace

TEST(Cuts, SmallCases) {
  EXPECT_NEAR(gaussian_equal_mass_cuts(2)[0], 0.0, 1e-12);
  const auto c4 = gaussian_equal_mass_cuts(4);
  ASSERT_EQ(c4.size(), 3u);
  EXPECT_NEAR(c4[0], -0.67449, 1e-5);
  EXPECT_NEAR(c4[1], 0.0, 1e-12);
  EXPECT_NEAR(c4[2], 0.67449, 1e-5);
  EXPECT_THROW(gaussian_equal_mass_cuts(1), std::invalid_argument);
}

TEST(Cuts, EqualMassAgainstQuadrature) {
  for (int T : {2, 3, 5, 8}) {
    const auto c = gaussian_equal_mass_cuts(T);
    double prev = 0.0;
    for (std::size_t i = 0; i <= c.size(); ++i) {
      const double now = i < c.size() ? cdf_by_quadrature(c[i]) : 1.0;
      EXPECT_NEAR(now - prev, 1.0 / T, 1e-10);
      prev = now;
    }
  }
}

TEST(StepNet, SingleCut) {
  const auto net = build_step_net({{0.0}, 0.2});
  EXPECT_EQ(step_outputs(net, -1.0), (Vector{{1.0, 0.0}}));
  EXPECT_EQ(step_outputs(net, 1.0), (Vector{{0.0, 1.0}}));
  const Vector mid = step_outputs(net, 0.0);
  EXPECT_NEAR(mid[0], 0.5, 1e-12);
  EXPECT_NEAR(mid[1], 0.5, 1e-12);
  EXPECT_EQ(net.layer_count(), 3u);
}

TEST(StepNet, MidpointsSplitEvenly) {
  const std::vector<double> cuts{-1.0, 0.3, 2.0};
  const auto net = build_step_net({cuts, 0.1});
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const Vector x = step_outputs(net, cuts[i]);
    EXPECT_NEAR(x[static_cast<Index>(i)], 0.5, 1e-12);
    EXPECT_NEAR(x[static_cast<Index>(i) + 1], 0.5, 1e-12);
  }
}

TEST(StepNet, PartitionOfUnity) {
  const auto net = build_step_net({gaussian_equal_mass_cuts(6), 0.01});
  Rng r(1);
  Matrix h(1, 100000);
  for (Index j = 0; j < h.cols(); ++j) h(0, j) = 3 * r.normal();
  const Matrix x = net.forward_batch(h);
  EXPECT_LT((x.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-9);
}

TEST(StepNet, PlateausAreExact) {
  const StepNetSpec spec{gaussian_equal_mass_cuts(5), 0.02};
  const auto net = build_step_net(spec);
  Rng r(2);
  std::vector<double> edges{-6.0};
  edges.insert(edges.end(), spec.cuts.begin(), spec.cuts.end());
  edges.push_back(6.0);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i] + (i > 0 ? spec.ramp_width / 2 : 0.0);
    const double hi = edges[i + 1] - (i + 2 < edges.size() ? spec.ramp_width / 2 : 0.0);
    for (int k = 0; k < 2000; ++k) {
      const double h = r.uniform(lo, hi);
      const Vector x = step_outputs(net, h);
      for (Index t = 0; t < x.size(); ++t) {
        // Ramp units cancel through A - B; the difference is a rounding
        // residue of the large 1/w scale.
        EXPECT_NEAR(x[t], t == static_cast<Index>(i) ? 1.0 : 0.0, 1e-9) << "h = " << h;
      }
    }
  }
}

TEST(StepNet, RejectsBadSpecs) {
  EXPECT_THROW(build_step_net({{0.0, 0.1}, 0.2}), std::invalid_argument);
  EXPECT_THROW(build_step_net({{0.5, 0.1}, 0.01}), std::invalid_argument);
  EXPECT_THROW(build_step_net({{0.0}, 0.0}), std::invalid_argument);
}

TEST(Fold, SingleComponentIsExact) {
  const auto comps = relu_components(1, 3, 7, 2, 3);
  const auto fg = fold(comps, 0.01);
  Rng r(4);
  for (int k = 0; k < 1000; ++k) {
    Vector in(4);
    for (Index i = 0; i < 4; ++i) in[i] = r.normal();
    EXPECT_EQ(fg.net.forward(in), comps[0].forward(in.tail(3)));
  }
  EXPECT_EQ(tv_defect(fg, comps, 10000, 5), 0.0);
}

TEST(Fold, LayerCountIsComponentPlusOne) {
  for (int T : {1, 2, 5}) {
    const auto comps = relu_components(T, 2, 6, 2, static_cast<std::uint64_t>(T));
    const auto fg = fold(comps, 0.01);
    EXPECT_EQ(fg.net.affine_count(), comps[0].affine_count() + 1);
    EXPECT_EQ(fg.param_count(), fg.net.param_count());
    EXPECT_GT(fg.param_count(), T * comps[0].param_count() - 1);
  }
}

TEST(Fold, ThreeConstantGenerators) {
  const std::vector<Vector> pts{Vector{{1.0, 2.0}}, Vector{{3.0, 0.5}}, Vector{{0.25, 4.0}}};
  std::vector<MultilayerNet> comps;
  for (const auto& p : pts) comps.push_back(constant_generator(p, 2));
  const auto fg = fold(comps, 0.01);
  Rng r(6);
  const Index n = 100000;
  Matrix probes(3, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < 3; ++i) probes(i, j) = r.normal();
  const Matrix y = fg.net.forward_batch(probes);
  std::vector<Index> counts(3, 0);
  for (Index j = 0; j < n; ++j) {
    const double h0 = probes(0, j);
    if (fg.in_ramp_band(h0)) continue;
    int hits = 0, which = -1;
    for (int t = 0; t < 3; ++t) {
      if ((y.col(j) - pts[static_cast<std::size_t>(t)]).cwiseAbs().maxCoeff() <= 1e-9) {
        ++hits;
        which = t;
      }
    }
    ASSERT_EQ(hits, 1) << "h0 = " << h0;
    EXPECT_EQ(which, fg.ideal_component(h0));
    ++counts[static_cast<std::size_t>(which)];
  }
  const double sd = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (Index c : counts) {
    EXPECT_NEAR(c / static_cast<double>(n), 1.0 / 3, 0.02);
    EXPECT_NEAR(static_cast<double>(c), n / 3.0, 5 * sd);
  }
}

TEST(Fold, OutputsMatchSelectedComponent) {
  const auto comps = relu_components(4, 2, 8, 3, 7);
  const auto fg = fold(comps, 0.01);
  Rng r(8);
  for (int k = 0; k < 20000; ++k) {
    Vector in(3);
    for (Index i = 0; i < 3; ++i) in[i] = r.normal();
    if (fg.in_ramp_band(in[0])) continue;
    const Vector want = comps[static_cast<std::size_t>(fg.ideal_component(in[0]))].forward(in.tail(2));
    EXPECT_LE((fg.net.forward(in) - want).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Fold, BandFractionBelowBudget) {
  const auto comps = relu_components(5, 2, 4, 2, 9);
  const double delta = 0.01;
  const auto fg = fold(comps, delta);
  EXPECT_NEAR(fg.ramp_width, delta / 500, 1e-18);
  EXPECT_LE(fg.ramp_band_mass(), delta);
  Rng r(10);
  Index in_band = 0;
  const Index n = 100000;
  for (Index k = 0; k < n; ++k) in_band += fg.in_ramp_band(r.normal()) ? 1 : 0;
  EXPECT_LE(static_cast<double>(in_band) / n, delta);
}

TEST(Fold, DefectWithinBudget) {
  const auto comps = relu_components(5, 2, 16, 2, 11);
  const auto fg = fold(comps, 0.01);
  EXPECT_LE(tv_defect(fg, comps, 100000, 12), 0.01);
}

TEST(Fold, SmallDisableMagnitudeIsRejectedAndWouldLeak) {
  // Component with a known large output: constant 50 on each coordinate.
  std::vector<MultilayerNet> comps;
  for (int t = 0; t < 3; ++t) comps.push_back(constant_generator(Vector::Constant(2, 50.0 + t), 2));
  const auto checked = fold(comps, 0.01);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_GE(checked.output_bounds[t], 50.0 + static_cast<double>(t));
  FoldOptions opts;
  opts.disable_magnitudes = std::vector<double>(3, 1.0);
  EXPECT_THROW(fold(comps, 0.01, opts), std::invalid_argument);
  const auto leaky = fold_unchecked(comps, 0.01 / 300, std::vector<double>(3, 1.0));
  EXPECT_GT(tv_defect(leaky, comps, 20000, 13), 0.5);
}

TEST(Fold, RejectsNonReluOrMismatchedComponents) {
  Rng rng(14);
  std::vector<MultilayerNet> lin{MultilayerNet::glorot_uniform({2, 3, 2}, Activation::identity, rng)};
  EXPECT_THROW(fold(lin, 0.01), std::invalid_argument);
  std::vector<MultilayerNet> mixed{MultilayerNet({2, 3, 2}, Activation::relu), MultilayerNet({2, 4, 2}, Activation::relu)};
  EXPECT_THROW(fold(mixed, 0.01), std::invalid_argument);
  EXPECT_THROW(fold({}, 0.01), std::invalid_argument);
  EXPECT_THROW(constant_generator(Vector{{-1.0}}, 1), std::invalid_argument);
}

TEST(Fold, JsonRoundTrip) {
  const auto comps = relu_components(3, 2, 5, 2, 15);
  const auto fg = fold(comps, 0.01);
  const auto j = nlohmann::json::parse(to_json(fg).dump());
  const auto back = nn::net_from_json(j.at("net"));
  EXPECT_EQ(back.params(), fg.net.params());
  EXPECT_EQ(back.layer_dims(), fg.net.layer_dims());
  EXPECT_EQ(j.at("manifest").at("components"), 3);
  EXPECT_EQ(j.at("manifest").at("cuts").size(), 2u);
  EXPECT_EQ(j.at("manifest").at("param_count"), fg.param_count());
}

TEST(PureEquilibrium, SinglePoint) {
  const dist::EmpiricalDistribution target(Matrix{{0.3, -0.7}});
  const auto res = pure_equilibrium_demo(target, div::MeasuringFunction::linear(), {2, 8, 1}, 300, 1);
  EXPECT_LE(res.epsilon, 0.02);
  EXPECT_EQ(res.half_payoff, 1.0);
}

TEST(PureEquilibrium, CircleSupportHalfPayoffIsExact) {
  const auto phi = div::MeasuringFunction::log_shifted(0.1);
  PureEquilibriumOptions opts;
  opts.samples = 500;
  const auto res = pure_equilibrium_demo(dist::CirclePointTarget::support(), phi, {2, 8, 1}, 50, 2, opts);
  EXPECT_EQ(res.half_payoff, 2 * phi(0.5));
  EXPECT_EQ(res.expected_half_payoff, 2 * phi(0.5));
  Index total = 0;
  for (Index c : res.selection_counts) total += c;
  EXPECT_EQ(total, 500);
}
