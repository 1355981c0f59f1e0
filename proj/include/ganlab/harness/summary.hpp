#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ganlab::harness {

/// A declared threshold: value <op> threshold.
struct Check {
  std::string name;
  double value = 0.0;
  std::string op;  // one of <=, <, >=, >, ==
  double threshold = 0.0;
  bool passed = false;
};

inline bool compare(double value, const std::string& op, double threshold) {
  if (op == "<=") return value <= threshold;
  if (op == "<") return value < threshold;
  if (op == ">=") return value >= threshold;
  if (op == ">") return value > threshold;
  if (op == "==") return value == threshold;
  throw std::invalid_argument("unknown comparison '" + op + "'");
}

struct RunSummary {
  std::string experiment;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  double wall_clock_seconds = 0.0;
  std::string error;  // empty when the run completed

  Check& check(const std::string& name, double value, const std::string& op, double threshold) {
    checks.push_back({name, value, op, threshold, compare(value, op, threshold)});
    return checks.back();
  }

  /// Boolean checks are recorded as value 1/0 against == 1.
  Check& check(const std::string& name, bool ok) { return check(name, ok ? 1.0 : 0.0, "==", 1.0); }

  bool passed() const {
    if (!error.empty()) return false;
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

// Non-finite numbers have no JSON form; they are written as strings.
inline nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline double number_from(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  throw std::invalid_argument("not a number: " + s);
}

inline nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json j;
  j["schema"] = "ganlab.run-summary/1";
  j["experiment"] = s.experiment;
  j["seed"] = s.seed;
  j["config"] = s.config;
  j["metrics"] = s.metrics;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : s.checks)
    j["checks"].push_back(
        {{"name", c.name}, {"value", number(c.value)}, {"op", c.op}, {"threshold", number(c.threshold)}, {"passed", c.passed}});
  j["passed"] = s.passed();
  j["artifacts"] = s.artifacts;
  j["wall_clock_seconds"] = s.wall_clock_seconds;
  j["error"] = s.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.error);
  return j;
}

struct VerifyResult {
  bool ok = false;
  std::vector<std::string> messages;
};

/// Re-evaluates every stored check and confirms the recorded verdicts.
inline VerifyResult verify(const nlohmann::json& j) {
  VerifyResult r;
  if (!j.contains("checks") || !j.contains("passed")) {
    r.messages.push_back("summary lacks checks or passed fields");
    return r;
  }
  bool all = true, consistent = true;
  for (const auto& c : j.at("checks")) {
    const std::string name = c.at("name").get<std::string>();
    const bool now = compare(number_from(c.at("value")), c.at("op").get<std::string>(), number_from(c.at("threshold")));
    if (now != c.at("passed").get<bool>()) {
      consistent = false;
      r.messages.push_back(name + ": stored verdict disagrees with recomputed one");
    }
    if (!now) r.messages.push_back(name + ": FAIL");
    all = all && now;
  }
  const bool errored = j.contains("error") && !j.at("error").is_null();
  if (errored) r.messages.push_back("run error: " + j.at("error").get<std::string>());
  if ((all && !errored) != j.at("passed").get<bool>()) {
    consistent = false;
    r.messages.push_back("stored overall verdict disagrees with the checks");
  }
  r.ok = all && !errored && consistent;
  return r;
}

inline VerifyResult verify_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return verify(nlohmann::json::parse(f));
}

}  // namespace ganlab::harness
