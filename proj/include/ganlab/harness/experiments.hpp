#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ganlab/core/csv.hpp"
#include "ganlab/core/random.hpp"
#include "ganlab/core/stats.hpp"
#include "ganlab/dist/distributions.hpp"
#include "ganlab/div/generalization.hpp"
#include "ganlab/div/js.hpp"
#include "ganlab/div/nn_distance.hpp"
#include "ganlab/div/wasserstein.hpp"
#include "ganlab/dynamics/best_response.hpp"
#include "ganlab/folding/fold.hpp"
#include "ganlab/folding/pure_equilibrium.hpp"
#include "ganlab/harness/config.hpp"
#include "ganlab/harness/summary.hpp"
#include "ganlab/mixgan/mixture.hpp"
#include "ganlab/mixgan/train.hpp"

namespace ganlab::harness {

namespace fs = std::filesystem;
using nn::Index;

/// Where a run writes its tables, and the summary being filled in.
class RunContext {
 public:
  RunContext(fs::path dir, RunSummary& summary) : dir_(std::move(dir)), summary_(summary) {}

  RunSummary& summary() { return summary_; }
  const fs::path& dir() const { return dir_; }

  /// Opens <dir>/<name> for writing and records it as an artifact.
  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    summary_.artifacts.push_back(p.string());
    return f;
  }

 private:
  fs::path dir_;
  RunSummary& summary_;
};

using ExperimentFn = std::function<void(const Config&, std::uint64_t seed, RunContext&)>;

struct Experiment {
  std::string id;
  std::string description;
  std::string anchor;  // the claim being reproduced
  std::vector<ConfigKey> keys;
  ExperimentFn run;
};

namespace detail {

inline std::string fmt(double v) { return csv::format(v); }
inline std::string fmt(Index v) { return csv::format(static_cast<std::int64_t>(v)); }

inline std::vector<Index> disc_dims(Index input, const std::vector<Index>& hidden) {
  std::vector<Index> d{input};
  d.insert(d.end(), hidden.begin(), hidden.end());
  d.push_back(1);
  return d;
}

inline div::NnDistanceOptions nn_options(const Config& c) {
  div::NnDistanceOptions o;
  o.adam.learning_rate = c.real("lr");
  o.batch_size = c.integer("batch");
  o.eval_every = static_cast<int>(c.integer("eval_every"));
  return o;
}

// ---- lemma1 ----

inline void run_lemma1(const Config& c, std::uint64_t seed, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  const Index d = c.integer("d"), m = c.integer("m"), probes = c.integer("probes");
  const double radius = c.real("radius");
  const auto mu = dist::ScaledGaussian::unit_norm(d);
  const auto emp = dist::sample(mu, m, derive_seed(seed, 1));
  const double js = div::js_continuous_vs_empirical(mu, emp);

  Rng rng(derive_seed(seed, 2));
  std::vector<double> nearest;
  auto f = ctx.open("probes.csv");
  csv::Writer w(f);
  w.header({"probe", "nearest_distance"});
  Index far = 0;
  for (Index k = 0; k < probes; ++k) {
    const double dist = dist::nearest_sample_distance(emp, mu.draw(rng));
    nearest.push_back(dist);
    if (dist >= radius) ++far;
    w.row({fmt(k), fmt(dist)});
  }
  const double frac = static_cast<double>(far) / static_cast<double>(probes);
  s.metrics["js"] = js;
  s.metrics["fraction_far"] = frac;
  s.metrics["median_nearest"] = median(nearest);
  s.metrics["min_nearest"] = *std::min_element(nearest.begin(), nearest.end());
  s.check("js_equals_log2", js, "==", std::log(2.0));
  s.check("fraction_nearest_ge_radius", frac, ">=", c.real("min_fraction"));
}

// ---- thmB1 ----

inline void run_thmB1(const Config& c, std::uint64_t seed, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  const Index d = c.integer("d"), m = c.integer("m");
  const auto mu = dist::ScaledGaussian::unit_norm(d);
  const auto a = dist::sample(mu, m, derive_seed(seed, 1));
  const auto b = dist::sample(mu, m, derive_seed(seed, 2));
  const double w = div::wasserstein_exact(a, b);
  const double sigma = dist::default_smoothing_sigma(m, c.real("sigma_c"));
  const auto est = div::js_monte_carlo(dist::convolve_with_gaussian(a, sigma), dist::convolve_with_gaussian(b, sigma),
                                       c.integer("js_samples"), derive_seed(seed, 3));
  const double bound = std::log(2.0) - 1.0 / static_cast<double>(m);
  s.metrics["wasserstein"] = w;
  s.metrics["sigma"] = sigma;
  s.metrics["js_smoothed"] = est.value;
  s.metrics["js_stderr"] = est.standard_error;
  s.metrics["js_bound"] = bound;
  auto f = ctx.open("thmB1.csv");
  csv::Writer wr(f);
  wr.header({"wasserstein", "sigma", "js_smoothed", "js_stderr", "js_bound"});
  wr.row({fmt(w), fmt(sigma), fmt(est.value), fmt(est.standard_error), fmt(bound)});
  s.check("wasserstein_ge_threshold", w, ">=", c.real("w_threshold"));
  s.check("js_smoothed_above_bound", est.value + 3.0 * est.standard_error, ">=", bound);
}

// ---- gen-gap ----

inline void write_gap_rows(csv::Writer& w, const std::string& name, const div::GapTable& t) {
  for (const auto& r : t.rows)
    w.row({name, fmt(r.m), std::to_string(r.trial), fmt(r.train_estimate), fmt(r.population_estimate), fmt(r.gap)});
  for (const auto& g : t.summary)
    w.row({name, fmt(g.m), "median", "", "", fmt(g.gap_median)});
}

inline void run_gen_gap(const Config& c, std::uint64_t seed, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  const Index d = c.integer("d");
  const auto ms = c.index_list("m_values");
  if (ms.size() < 2) throw ConfigError("m_values needs at least two sizes");
  const auto dims = disc_dims(d, c.index_list("disc_hidden"));
  const auto mu = dist::ScaledGaussian::unit_norm(d);
  div::GapOptions go;
  go.trials = static_cast<int>(c.integer("trials"));
  go.population_factor = c.real("population_factor");
  const auto nn = div::generalization_gap(
      mu, mu, ms, div::nn_distance_fn(c.phi(), dims, static_cast<int>(c.integer("budget")), nn_options(c)),
      derive_seed(seed, 1), go);

  // Wasserstein in the same harness. Its empirical versions do not
  // converge, so the population value (0, identical distributions) is used.
  const Index wd = c.integer("w_d");
  const auto wmu = dist::ScaledGaussian::unit_norm(wd);
  div::GapOptions wo;
  wo.trials = go.trials;
  wo.known_population_distance = 0.0;
  const auto wt = div::generalization_gap(wmu, wmu, c.index_list("w_m_values"), div::wasserstein_fn(),
                                          derive_seed(seed, 2), wo);

  auto f = ctx.open("gap.csv");
  csv::Writer w(f);
  w.header({"distance", "m", "trial", "train_estimate", "population_estimate", "gap"});
  write_gap_rows(w, "nn", nn);
  write_gap_rows(w, "wasserstein", wt);

  const double first = nn.at(ms.front()).gap_median, last = nn.at(ms.back()).gap_median;
  double w_min = INFINITY;
  for (const auto& g : wt.summary) w_min = std::min(w_min, g.gap_median);
  s.metrics["disc_params"] = nn::MultilayerNet(dims, nn::Activation::sigmoid).param_count();
  for (const auto& g : nn.summary) s.metrics["nn_gap_median"][std::to_string(g.m)] = g.gap_median;
  for (const auto& g : wt.summary) s.metrics["w_gap_median"][std::to_string(g.m)] = g.gap_median;
  s.check("nn_gap_shrinks", last, "<", first);
  s.check("nn_gap_at_largest_m", last, "<=", c.real("max_gap"));
  s.check("wasserstein_gap_stays_large", w_min, ">=", c.real("w_min_gap"));
}

// ---- diversity ----

inline void run_diversity(const Config& c, std::uint64_t seed, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  const auto sizes = c.index_list("sizes");
  const auto dims = disc_dims(2, c.index_list("disc_hidden"));
  div::DiversityOptions o;
  o.trials = static_cast<int>(c.integer("trials"));
  o.population_factor = c.real("population_factor");
  o.min_population = c.integer("min_population");
  o.nn = nn_options(c);
  const auto t = div::diversity_probe(dist::RingTarget{}, sizes, dims, c.phi(), static_cast<int>(c.integer("budget")),
                                      derive_seed(seed, 1), o);
  auto f = ctx.open("diversity.csv");
  csv::Writer w(f);
  w.header({"m", "trial", "estimate"});
  for (const auto& r : t.rows) w.row({fmt(r.m), std::to_string(r.trial), fmt(r.estimate)});
  for (const auto& g : t.summary) w.row({fmt(g.m), "median", fmt(g.median)});

  const double slack = c.real("monotone_slack");
  double worst_rise = -INFINITY;
  for (std::size_t i = 1; i < t.summary.size(); ++i)
    worst_rise = std::max(worst_rise, t.summary[i].median - t.summary[i - 1].median);
  s.metrics["disc_params"] = nn::MultilayerNet(dims, nn::Activation::sigmoid).param_count();
  for (const auto& g : t.summary) s.metrics["median"][std::to_string(g.m)] = g.median;
  s.metrics["worst_rise"] = worst_rise;
  if (t.summary.size() > 1) s.check("weakly_decreasing", worst_rise, "<=", slack);
  s.check("largest_support_estimate", t.summary.back().median, "<=", c.real("max_final"));
}

// ---- mixgan-ring ----

inline mixgan::TrainConfig train_config(const Config& c, int T, std::uint64_t seed, Index width_factor) {
  mixgan::TrainConfig t;
  t.T = T;
  t.T_disc = c.integer("T_disc") == 0 ? T : static_cast<int>(c.integer("T_disc"));
  t.steps = static_cast<int>(c.integer("steps"));
  t.batch_size = c.integer("batch");
  t.learning_rate = c.real("lr");
  t.entropy_weight = c.real("entropy_weight");
  t.seed = seed;
  t.target = "ring";
  t.eval_every = static_cast<int>(c.integer("eval_every"));
  t.eval_samples = c.integer("eval_samples");
  t.disc_steps_per_gen_step = static_cast<int>(c.integer("disc_steps"));
  t.gen_hidden = c.index_list("gen_hidden");
  for (auto& h : t.gen_hidden) h *= width_factor;
  t.disc_hidden = c.index_list("disc_hidden");
  for (auto& h : t.disc_hidden) h *= width_factor;
  t.noise_dim = c.integer("noise_dim");
  t.non_saturating = c.boolean("non_saturating");
  t.phi = c.phi();
  return t;
}

inline void run_mixgan_ring(const Config& c, std::uint64_t seed, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  const int runs = static_cast<int>(c.integer("runs"));
  const int T = static_cast<int>(c.integer("T"));
  const Index factor = c.integer("baseline_width_factor");
  auto cov = ctx.open("coverage.csv");
  csv::Writer cw(cov);
  cw.header({"model", "run", "seed", "coverage", "aborted"});
  auto log = ctx.open("training_log.csv");
  csv::Writer lw(log);
  lw.header({"model", "run", "step", "objective", "coverage", "gen_weights"});

  std::vector<double> mix_cov, base_cov;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t rs = derive_seed(seed, 100 + static_cast<std::uint64_t>(r));
    for (int which = 0; which < 2; ++which) {
      const bool mixture = which == 0;
      const auto tc = train_config(c, mixture ? T : 1, rs, mixture ? 1 : factor);
      const auto res = mixgan::train(tc);
      const auto samples = mixgan::sample_mixture(res.mixture, tc.eval_samples, derive_seed(rs, 7));
      const int coverage = mixgan::mode_coverage(dist::RingTarget{}, samples);
      const std::string name = mixture ? "mixture" : "baseline";
      (mixture ? mix_cov : base_cov).push_back(coverage);
      cw.row({name, std::to_string(r), std::to_string(rs), std::to_string(coverage), res.aborted ? "1" : "0"});
      for (const auto& row : res.log) {
        std::string ws;
        for (Index k = 0; k < row.gen_weights.size(); ++k) ws += (k ? ";" : "") + fmt(row.gen_weights[k]);
        lw.row({name, std::to_string(r), std::to_string(row.step), fmt(row.objective), std::to_string(row.coverage), ws});
      }
      if (res.aborted) s.metrics["aborts"].push_back(name + " run " + std::to_string(r) + ": " + res.abort_reason);
    }
  }
  const double mm = median(mix_cov), bm = median(base_cov);
  s.metrics["mixture_coverage"] = mix_cov;
  s.metrics["baseline_coverage"] = base_cov;
  s.metrics["mixture_median"] = mm;
  s.metrics["baseline_median"] = bm;
  s.check("mixture_not_worse_than_baseline", mm, ">=", bm);
  s.check("mixture_modes_covered", mm, ">=", c.real("min_modes"));
}

// ---- fold-tv ----

inline void run_fold_tv(const Config& c, std::uint64_t seed, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  const int T = static_cast<int>(c.integer("T"));
  const double delta = c.real("delta_tv");
  const Index n = c.integer("probes");
  const Index l = c.integer("noise_dim");
  std::vector<Index> dims{l};
  for (Index h : c.index_list("hidden")) dims.push_back(h);
  dims.push_back(c.integer("out_dim"));
  Rng init(derive_seed(seed, 1));
  std::vector<nn::MultilayerNet> comps;
  for (int t = 0; t < T; ++t) comps.push_back(nn::MultilayerNet::glorot_uniform(dims, nn::Activation::relu, init));
  const auto fg = folding::fold(comps, delta);
  const double defect = folding::tv_defect(fg, comps, n, derive_seed(seed, 2));

  // Selector statistics on an independent draw of h0.
  Rng rng(derive_seed(seed, 3));
  std::vector<Index> counts(static_cast<std::size_t>(T), 0);
  Index in_band = 0;
  for (Index k = 0; k < n; ++k) {
    const double h0 = rng.normal();
    ++counts[static_cast<std::size_t>(fg.ideal_component(h0))];
    if (fg.in_ramp_band(h0)) ++in_band;
  }
  const double p = 1.0 / T;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  double worst_z = 0.0;
  for (Index k : counts) worst_z = std::max(worst_z, std::abs(static_cast<double>(k) - static_cast<double>(n) * p) / sd);

  {
    auto f = ctx.open("folded.json");
    f << folding::to_json(fg).dump(1) << '\n';
  }
  auto f = ctx.open("selection.csv");
  csv::Writer w(f);
  w.header({"component", "count", "expected"});
  for (int t = 0; t < T; ++t) w.row({std::to_string(t), fmt(counts[static_cast<std::size_t>(t)]), fmt(static_cast<double>(n) * p)});

  s.metrics["tv_defect"] = defect;
  s.metrics["band_fraction"] = static_cast<double>(in_band) / static_cast<double>(n);
  s.metrics["band_mass"] = fg.ramp_band_mass();
  s.metrics["ramp_width"] = fg.ramp_width;
  s.metrics["disable_magnitudes"] = fg.disable_magnitudes;
  s.metrics["component_params"] = fg.component_param_count;
  s.metrics["folded_params"] = fg.param_count();
  s.metrics["folded_layers"] = fg.net.layer_count();
  s.metrics["selection_worst_sigma"] = worst_z;
  s.check("tv_defect_within_budget", defect, "<=", delta);
  s.check("band_fraction_within_budget", static_cast<double>(in_band) / static_cast<double>(n), "<=", delta);
  s.check("selection_uniform", worst_z, "<=", c.real("max_sigma"));
}

// ---- pure-eq ----

inline void run_pure_eq(const Config& c, std::uint64_t seed, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  const auto phi = c.phi();
  folding::PureEquilibriumOptions o;
  o.delta_tv = c.real("delta_tv");
  o.samples = c.integer("samples");
  o.nn = nn_options(c);
  const auto dims = disc_dims(2, c.index_list("challenger_hidden"));
  const auto r = folding::pure_equilibrium_demo(dist::CirclePointTarget::support(), phi, dims,
                                                static_cast<int>(c.integer("budget")), seed, o);
  s.metrics["epsilon"] = r.epsilon;
  s.metrics["half_payoff"] = r.half_payoff;
  s.metrics["expected_half_payoff"] = r.expected_half_payoff;
  s.metrics["selection_counts"] = r.selection_counts;
  s.metrics["folded_params"] = r.folded_param_count;
  s.metrics["challenger_params"] = nn::MultilayerNet(dims, nn::Activation::sigmoid).param_count();
  auto f = ctx.open("pure_eq.csv");
  csv::Writer w(f);
  w.header({"epsilon", "half_payoff", "expected_half_payoff"});
  w.row({fmt(r.epsilon), fmt(r.half_payoff), fmt(r.expected_half_payoff)});
  s.check("challenger_epsilon", r.epsilon, "<=", c.real("max_epsilon"));
  s.check("half_payoff_exact", r.half_payoff, "==", r.expected_half_payoff);
}

// ---- best-response ----

inline void write_trace(RunContext& ctx, const dynamics::BestResponseTrace& tr) {
  auto f = ctx.open("trace.csv");
  csv::Writer w(f);
  std::vector<std::string> head{"iteration"};
  const auto& r0 = tr.records.front();
  for (std::size_t k = 0; k < r0.theta.size(); ++k) head.push_back("theta" + std::to_string(k));
  for (std::size_t k = 0; k < r0.phi.size(); ++k) head.push_back("phi" + std::to_string(k));
  head.insert(head.end(), {"objective", "d_theta", "d_prev_theta"});
  w.header(head);
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    const auto& r = tr.records[i];
    std::vector<std::string> row{std::to_string(i)};
    for (double t : r.theta) row.push_back(fmt(t));
    for (double p : r.phi) row.push_back(fmt(p));
    row.push_back(fmt(r.objective));
    row.push_back(fmt(r.d_at_theta));
    row.push_back(std::isnan(r.d_prev_at_theta) ? "" : fmt(r.d_prev_at_theta));
    w.row(row);
  }
}

inline void run_best_response_1(const Config& c, std::uint64_t, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  auto tr = dynamics::run_example_1(static_cast<int>(c.integer("iterations")), c.real("theta0"),
                                    static_cast<int>(c.integer("resolution")));
  dynamics::finalize(tr, c.real("tol"));
  write_trace(ctx, tr);
  double min_jump = INFINITY;
  for (std::size_t i = 1; i < tr.records.size(); ++i)
    min_jump = std::min(min_jump, std::abs(tr.records[i].d_at_theta - tr.records[i].d_prev_at_theta));
  const auto& first = tr.records[1];
  const double d_before = dynamics::bump(tr.records[0].theta[0], first.phi[0]);
  s.metrics["verdict"] = tr.verdict;
  s.metrics["period"] = tr.period;
  s.metrics["min_jump"] = min_jump;
  s.check("min_jump_at_least_quarter", min_jump, ">=", 0.25);
  s.check("first_disc_small_at_theta0", d_before, "<=", 0.001);
  // A grid argmax sits up to half a cell off the continuum one, which costs
  // O(10 * cell^2) in the bump values.
  s.check("first_disc_true_mass", dynamics::true_expectation(first.phi[0]), ">=", 1.0 / 3.0 - c.real("grid_slack"));
  s.check("verdict_cycling", tr.verdict == "cycling");
}

inline void run_best_response_2(const Config& c, std::uint64_t, RunContext& ctx) {
  RunSummary& s = ctx.summary();
  auto tr = dynamics::run_example_2(static_cast<int>(c.integer("iterations")), static_cast<int>(c.integer("resolution")));
  dynamics::finalize(tr, c.real("tol"));
  write_trace(ctx, tr);
  const auto pts = dynamics::true_points();
  bool equal = true, hops = true;
  double worst_close = 0.0;
  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    const auto& th = tr.records[i].theta;
    equal = equal && th[0] == th[1] && th[1] == th[2];
    worst_close = std::max(worst_close, dynamics::angular_distance(th[0], pts[dynamics::nearest_true_point(th[0])]));
    if (i >= 2 && dynamics::nearest_true_point(th[0]) == dynamics::nearest_true_point(tr.records[i - 1].theta[0]))
      hops = false;
  }
  double phi_close = 0.0;
  for (double p : tr.records[1].phi)
    phi_close = std::max(phi_close, std::min(dynamics::angular_distance(p, pts[1]), dynamics::angular_distance(p, pts[2])));
  s.metrics["verdict"] = tr.verdict;
  s.metrics["period"] = tr.period;
  s.metrics["worst_true_point_distance"] = worst_close;
  s.check("theta_coordinates_equal", equal);
  s.check("theta_near_true_point", worst_close, "<=", 0.1);
  s.check("nearest_point_changes", hops);
  s.check("first_phi_near_other_points", phi_close, "<=", 0.05);
  s.check("verdict_cycling", tr.verdict == "cycling");
}

}  // namespace detail

inline const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = {
      {"lemma1", "JS is log 2 and nearest-sample distances stay large for a high-dimensional Gaussian",
       "JS and Wasserstein fail to generalize from samples",
       {{"d", "100", "dimension"},
        {"m", "500", "empirical sample count"},
        {"probes", "200", "fresh probes"},
        {"radius", "1.2", "distance threshold"},
        {"min_fraction", "0.99", "required fraction of far probes"}},
       detail::run_lemma1},
      {"thmB1", "Wasserstein and smoothed JS between two Gaussian empiricals stay large",
       "empirical W and smoothed JS do not shrink with m",
       {{"d", "100", "dimension"},
        {"m", "100", "samples per empirical"},
        {"js_samples", "2000", "Monte Carlo draws per side"},
        {"sigma_c", "0.2", "smoothing constant c in c / sqrt(log m)"},
        {"w_threshold", "1.1", "Wasserstein lower threshold"}},
       detail::run_thmB1},
      {"gen-gap", "Neural-net distance generalization gap shrinks with m; Wasserstein gap does not",
       "the neural-net distance generalizes",
       {{"d", "2", "dimension for the neural-net distance"},
        {"m_values", "64,256,1024,4096", "training sample sizes"},
        {"disc_hidden", "20,20", "discriminator hidden widths"},
        {"budget", "300", "ADAM steps per estimate"},
        {"lr", "0.001", "discriminator learning rate"},
        {"batch", "512", "minibatch size (0 = full batch)"},
        {"eval_every", "25", "full-objective evaluation cadence"},
        {"phi", "linear", "measuring function"},
        {"trials", "5", "trials per size"},
        {"population_factor", "10", "population stand-in size factor"},
        {"max_gap", "0.05", "allowed median gap at the largest m"},
        {"w_d", "100", "dimension for Wasserstein"},
        {"w_m_values", "64,128,256", "Wasserstein sample sizes"},
        {"w_min_gap", "1.0", "Wasserstein gap lower threshold"}},
       detail::run_gen_gap},
      {"diversity", "A small discriminator cannot tell the ring from a finite-support copy",
       "low-capacity discriminators miss lack of diversity",
       {{"sizes", "1,10,100,1000,10000", "support sizes"},
        {"disc_hidden", "16,16", "challenger hidden widths"},
        {"budget", "300", "ADAM steps per estimate"},
        {"lr", "0.001", "challenger learning rate"},
        {"batch", "512", "minibatch size (0 = full batch)"},
        {"eval_every", "25", "full-objective evaluation cadence"},
        {"phi", "linear", "measuring function"},
        {"trials", "5", "trials per size"},
        {"population_factor", "10", "population sample factor"},
        {"min_population", "2000", "smallest population sample"},
        {"monotone_slack", "0", "allowed rise between consecutive medians"},
        {"max_final", "0.05", "allowed median at the largest support"}},
       detail::run_diversity},
      {"mixgan-ring", "Mixture of generators against a width-matched single generator on the 8-mode ring",
       "mixture-of-generators training protocol",
       {{"T", "4", "mixture components"},
        {"T_disc", "0", "discriminators (0 = T)"},
        {"runs", "5", "training seeds per model"},
        {"steps", "3000", "training iterations"},
        {"batch", "64", "minibatch size"},
        {"lr", "0.001", "ADAM learning rate"},
        {"entropy_weight", "0.001", "entropy regularizer weight"},
        {"eval_every", "0", "log cadence (0 = off)"},
        {"eval_samples", "10000", "samples for mode coverage"},
        {"disc_steps", "1", "discriminator steps per generator step"},
        {"gen_hidden", "32,32", "generator hidden widths"},
        {"disc_hidden", "32,32", "discriminator hidden widths"},
        {"baseline_width_factor", "4", "width multiplier of the T=1 baseline"},
        {"noise_dim", "2", "generator input dimension"},
        {"non_saturating", "false", "non-saturating generator loss"},
        {"phi", "log:0.1", "measuring function"},
        {"min_modes", "7", "required median coverage"}},
       detail::run_mixgan_ring},
      {"fold-tv", "Folded generator matches the selected component except on ramp bands",
       "folding T generators within delta total variation",
       {{"T", "5", "components"},
        {"delta_tv", "0.01", "total variation budget"},
        {"probes", "100000", "probe inputs"},
        {"noise_dim", "2", "component input dimension"},
        {"hidden", "16", "component hidden widths"},
        {"out_dim", "2", "component output dimension"},
        {"max_sigma", "5", "selection deviation allowed, in binomial sigmas"}},
       detail::run_fold_tv},
      {"pure-eq", "Folded constant generators form a pure equilibrium on three circle points",
       "pure equilibrium with value 2 phi(1/2)",
       {{"challenger_hidden", "16,16", "challenger hidden widths"},
        {"budget", "2000", "challenger ADAM steps"},
        {"lr", "0.001", "challenger learning rate"},
        {"batch", "0", "minibatch size (0 = full batch)"},
        {"eval_every", "25", "full-objective evaluation cadence"},
        {"phi", "linear", "measuring function"},
        {"delta_tv", "0.01", "fold total variation budget"},
        {"samples", "3000", "folded-generator draws"},
        {"max_epsilon", "0.1", "allowed challenger gain"}},
       detail::run_pure_eq},
      {"best-response-1", "Best-response dynamics with one generator point never settles",
       "best response with one point cycles",
       {{"iterations", "50", "best-response rounds"},
        {"resolution", "100000", "grid points on the circle"},
        {"theta0", "0", "initial generator angle"},
        {"grid_slack", "1e-6", "allowed shortfall of grid expectations"},
        {"tol", "0.05", "cycle detection tolerance"}},
       detail::run_best_response_1},
      {"best-response-2", "Best-response dynamics with three generator points hops between true points",
       "best response with three points mode-hops",
       {{"iterations", "50", "best-response rounds"},
        {"resolution", "10000", "grid points per coordinate"},
        {"tol", "0.05", "cycle detection tolerance"}},
       detail::run_best_response_2},
  };
  return r;
}

inline const Experiment& find_experiment(const std::string& id) {
  for (const auto& e : registry())
    if (e.id == id) return e;
  throw ConfigError("unknown experiment '" + id + "'");
}

/// Defaults for an experiment plus the common keys `seed` and `out`.
inline Config default_config(const Experiment& e) {
  std::vector<ConfigKey> keys = e.keys;
  keys.push_back({"seed", "0", "run seed"});
  keys.push_back({"out", "runs", "output directory (must exist)"});
  return Config(keys);
}

struct RunOutcome {
  RunSummary summary;
  fs::path summary_path;
};

/// Runs one experiment; the summary is written even when the run throws.
inline RunOutcome run(const std::string& id, const Config& cfg) {
  const Experiment& e = find_experiment(id);
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  const fs::path base = cfg.str("out");
  if (!fs::is_directory(base)) throw ConfigError("output directory '" + base.string() + "' does not exist");
  const fs::path dir = base / e.id / std::to_string(seed);
  fs::create_directories(dir);

  RunOutcome out;
  RunSummary& s = out.summary;
  s.experiment = e.id;
  s.seed = seed;
  for (const auto& k : cfg.keys()) s.config[k] = cfg.str(k);
  RunContext ctx(dir, s);
  const auto start = std::chrono::steady_clock::now();
  try {
    e.run(cfg, seed, ctx);
  } catch (const std::exception& ex) {
    s.error = ex.what();
  }
  s.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.summary_path = dir / "summary.json";
  std::ofstream f(out.summary_path, std::ios::binary);
  f << to_json(s).dump(2) << '\n';
  return out;
}

}  // namespace ganlab::harness
