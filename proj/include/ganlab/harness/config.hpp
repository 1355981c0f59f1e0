#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/core/csv.hpp"
#include "ganlab/div/measuring.hpp"
#include "ganlab/nn/net.hpp"

namespace ganlab::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Flat key=value configuration. Every key has a declared default; setting
/// an undeclared key is an error. Later assignments win.
class Config {
 public:
  Config() = default;
  explicit Config(const std::vector<ConfigKey>& keys) {
    for (const auto& k : keys) {
      values_[k.name] = k.default_value;
      order_.push_back(k.name);
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    if (!has(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
  }

  /// Lines of `key = value`; '#' starts a comment.
  void load_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
      set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
  }

  void load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    load_text(ss.str());
  }

  /// Accepts `--key=value` or `key=value`.
  void apply_override(std::string arg) {
    if (arg.rfind("--", 0) == 0) arg.erase(0, 2);
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + arg + "' must have the form --key=value");
    set(arg.substr(0, eq), arg.substr(eq + 1));
  }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const {
    try {
      return csv::parse_double(str(key));
    } catch (const std::invalid_argument&) {
      throw ConfigError("config key '" + key + "': '" + str(key) + "' is not a number");
    }
  }

  std::int64_t integer(const std::string& key) const {
    const double v = real(key);
    if (v != static_cast<double>(static_cast<std::int64_t>(v)))
      throw ConfigError("config key '" + key + "': '" + str(key) + "' is not an integer");
    return static_cast<std::int64_t>(v);
  }

  bool boolean(const std::string& key) const {
    const std::string& v = str(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
  }

  /// Comma-separated integers, e.g. "16,16".
  std::vector<nn::Index> index_list(const std::string& key) const {
    std::vector<nn::Index> out;
    const std::string& v = str(key);
    if (trim(v).empty()) return out;
    for (const auto& part : csv::split(v)) {
      try {
        const double x = csv::parse_double(part);
        if (x < 0 || x != static_cast<double>(static_cast<nn::Index>(x))) throw std::invalid_argument("");
        out.push_back(static_cast<nn::Index>(x));
      } catch (const std::invalid_argument&) {
        throw ConfigError("config key '" + key + "': bad list entry '" + part + "'");
      }
    }
    return out;
  }

  div::MeasuringFunction phi(const std::string& key = "phi") const {
    try {
      return div::MeasuringFunction::parse(str(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  /// Keys in declaration order.
  const std::vector<std::string>& keys() const { return order_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

}  // namespace ganlab::harness
