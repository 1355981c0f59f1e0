#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ganlab::dynamics {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double wrap_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

/// Angle between two points on the unit circle, in [0, pi].
inline double angular_distance(double a, double b) {
  const double diff = wrap_angle(std::abs(a - b));
  return std::min(diff, two_pi - diff);
}

/// exp(-10 d(tau, phi)^2).
inline double bump(double tau, double phi) {
  const double d = angular_distance(tau, phi);
  return std::exp(-10.0 * d * d);
}

inline std::array<double, 3> true_points() { return {0.0, two_pi / 3.0, 2.0 * two_pi / 3.0}; }

/// E_{tau ~ true}[D_phi(tau)] for the single-bump discriminator.
inline double true_expectation(double phi) {
  double s = 0.0;
  for (double p : true_points()) s += bump(p, phi);
  return s / 3.0;
}

inline int nearest_true_point(double theta) {
  const auto pts = true_points();
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (angular_distance(theta, pts[k]) < angular_distance(theta, pts[best])) best = k;
  return best;
}

/// Grid argmax over angles 2 pi k / n; strict comparison keeps the smallest
/// angle on ties.
template <class F>
double grid_argmax(F&& f, int n) {
  if (n < 1) throw std::invalid_argument("grid_argmax: resolution must be >= 1");
  double best_x = 0.0, best_v = f(0.0);
  for (int k = 1; k < n; ++k) {
    const double x = two_pi * static_cast<double>(k) / static_cast<double>(n);
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return best_x;
}

struct TraceRecord {
  std::vector<double> theta;
  std::vector<double> phi;
  double objective = 0.0;      // discriminator objective at (theta^{i-1}, phi^i)
  double d_at_theta = 0.0;     // D_{phi^i}(theta^i)
  double d_prev_at_theta = 0.0;  // D_{phi^{i-1}}(theta^i); NaN at i = 0
};

struct BestResponseTrace {
  std::vector<TraceRecord> records;  // records[0] is the start state
  std::string verdict;
  int period = 0;
};

// ---- Example 1: one generator angle, one discriminator bump ----

struct CircleGan1 {
  double theta = 0.0;
  double phi = 0.0;
  int resolution = 100000;
};

inline double disc_value_1(double theta, double phi) { return true_expectation(phi) - bump(theta, phi); }

/// phi <- argmax E_true[D_phi] - D_phi(theta), then theta <- argmin -D_phi(theta).
inline CircleGan1 best_response_step_1(const CircleGan1& s) {
  if (s.resolution < 10000) throw std::invalid_argument("best_response_step_1: resolution must be >= 1e4");
  CircleGan1 next = s;
  next.phi = grid_argmax([&](double p) { return disc_value_1(s.theta, p); }, s.resolution);
  next.theta = grid_argmax([&](double t) { return bump(t, next.phi); }, s.resolution);
  return next;
}

/// phi^0 is taken equal to theta^0, so D_{phi^0}(theta^1) is defined.
inline BestResponseTrace run_example_1(int iterations, double theta0 = 0.0, int resolution = 100000) {
  BestResponseTrace tr;
  CircleGan1 s{theta0, theta0, resolution};
  tr.records.push_back({{s.theta}, {s.phi}, disc_value_1(s.theta, s.phi), bump(s.theta, s.phi), std::nan("")});
  for (int i = 0; i < iterations; ++i) {
    const CircleGan1 next = best_response_step_1(s);
    tr.records.push_back({{next.theta},
                          {next.phi},
                          disc_value_1(s.theta, next.phi),
                          bump(next.theta, next.phi),
                          bump(next.theta, s.phi)});
    s = next;
  }
  return tr;
}

// ---- Example 2: three generator points, three-bump discriminator ----

struct CircleGan2 {
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  std::array<double, 3> phi{0.0, 0.0, 0.0};
  int resolution = 10000;
};

inline double disc_2(double tau, const std::array<double, 3>& phi) {
  return (bump(tau, phi[0]) + bump(tau, phi[1]) + bump(tau, phi[2])) / 3.0;
}

inline double disc_value_2(const std::array<double, 3>& theta, const std::array<double, 3>& phi) {
  double real = 0.0, fake = 0.0;
  for (double p : true_points()) real += disc_2(p, phi);
  for (double t : theta) fake += disc_2(t, phi);
  return (real - fake) / 3.0;
}

/// The objective separates over phi_i: each maximises
/// E_true[bump(., phi_i)] - E_theta[bump(., phi_i)]. The generator then puts
/// all three points on one shared maximiser of D_phi.
inline CircleGan2 best_response_step_2(const CircleGan2& s) {
  if (s.resolution < 10000) throw std::invalid_argument("best_response_step_2: resolution must be >= 1e4");
  CircleGan2 next = s;
  auto per_coordinate = [&](double p) {
    double fake = 0.0;
    for (double t : s.theta) fake += bump(t, p);
    return true_expectation(p) - fake / 3.0;
  };
  // The three searches are independent and identical.
  for (int i = 0; i < 3; ++i) next.phi[i] = grid_argmax(per_coordinate, s.resolution);
  const double t = grid_argmax([&](double x) { return disc_2(x, next.phi); }, s.resolution);
  next.theta = {t, t, t};
  return next;
}

inline BestResponseTrace run_example_2(int iterations, int resolution = 10000) {
  BestResponseTrace tr;
  CircleGan2 s;
  s.resolution = resolution;
  auto vec = [](const std::array<double, 3>& a) { return std::vector<double>(a.begin(), a.end()); };
  tr.records.push_back(
      {vec(s.theta), vec(s.phi), disc_value_2(s.theta, s.phi), disc_2(s.theta[0], s.phi), std::nan("")});
  for (int i = 0; i < iterations; ++i) {
    const CircleGan2 next = best_response_step_2(s);
    tr.records.push_back({vec(next.theta), vec(next.phi), disc_value_2(s.theta, next.phi),
                          disc_2(next.theta[0], next.phi), disc_2(next.theta[0], s.phi)});
    s = next;
  }
  return tr;
}

// ---- verdicts ----

inline double state_distance(const TraceRecord& a, const TraceRecord& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.theta.size(); ++k) d = std::max(d, angular_distance(a.theta[k], b.theta[k]));
  for (std::size_t k = 0; k < a.phi.size(); ++k) d = std::max(d, angular_distance(a.phi[k], b.phi[k]));
  return d;
}

struct CycleVerdict {
  std::string verdict;  // converged | cycling | inconclusive
  int period = 0;
};

/// converged: every successive difference in the last quarter is below tol.
/// cycling: the final state recurs within tol after p >= 2 steps, and the
/// last quarter is p-periodic. Otherwise inconclusive.
inline CycleVerdict detect_cycle(const BestResponseTrace& tr, double tol) {
  const auto& r = tr.records;
  const std::size_t n = r.size();
  if (n < 4) throw std::invalid_argument("detect_cycle: need at least 4 records");
  const std::size_t tail = std::max<std::size_t>(2, n / 4);
  bool converged = true;
  for (std::size_t i = n - tail; i < n; ++i)
    if (state_distance(r[i], r[i - 1]) >= tol) converged = false;
  if (converged) return {"converged", 0};
  for (std::size_t p = 2; p + tail <= n && p < n; ++p) {
    bool periodic = true;
    for (std::size_t i = n - tail; i < n && periodic; ++i)
      if (i >= p && state_distance(r[i], r[i - p]) >= tol) periodic = false;
    if (periodic && state_distance(r[n - 1], r[n - 1 - p]) < tol) return {"cycling", static_cast<int>(p)};
  }
  return {"inconclusive", 0};
}

inline void finalize(BestResponseTrace& tr, double tol) {
  const CycleVerdict v = detect_cycle(tr, tol);
  tr.verdict = v.verdict;
  tr.period = v.period;
}

}  // namespace ganlab::dynamics
