// Command-line front end: lab run <id> [--key=value ...], lab list, lab verify <summary.json>.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ganlab/harness/experiments.hpp"

namespace h = ganlab::harness;

int main(int argc, char** argv) {
  CLI::App app{"ganlab experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment; extra --key=value arguments override the config");
  std::string id, config_file;
  run->add_option("id", id, "experiment id (see `lab list`)")->required();
  run->add_option("--config", config_file, "flat key=value config file, applied before overrides");
  run->allow_extras();

  auto* list = app.add_subcommand("list", "List experiments");
  bool show_keys = false;
  list->add_flag("--keys", show_keys, "also print every config key with its default");

  auto* verify = app.add_subcommand("verify", "Re-check the thresholds stored in a summary");
  std::string summary_path;
  verify->add_option("summary", summary_path, "path to summary.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& e : h::registry()) {
        std::cout << e.id << "\t" << e.description << "\t[" << e.anchor << "]\n";
        if (show_keys)
          for (const auto& k : e.keys) std::cout << "    " << k.name << " = " << k.default_value << "  # " << k.help << "\n";
      }
      return 0;
    }
    if (*verify) {
      const auto r = h::verify_file(summary_path);
      for (const auto& m : r.messages) std::cout << m << "\n";
      std::cout << (r.ok ? "PASS" : "FAIL") << "\n";
      return r.ok ? 0 : 1;
    }
    const auto& e = h::find_experiment(id);
    h::Config cfg = h::default_config(e);
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& extra : run->remaining()) cfg.apply_override(extra);
    const auto out = h::run(id, cfg);
    for (const auto& c : out.summary.checks)
      std::cout << (c.passed ? "pass  " : "FAIL  ") << c.name << ": " << c.value << " " << c.op << " " << c.threshold << "\n";
    if (!out.summary.error.empty()) std::cout << "error: " << out.summary.error << "\n";
    std::cout << "summary: " << out.summary_path.string() << " (" << out.summary.wall_clock_seconds << " s)\n";
    if (!out.summary.error.empty()) return 2;
    return out.summary.passed() ? 0 : 1;
  } catch (const h::ConfigError& ex) {
    std::cerr << "lab: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "lab: " << ex.what() << "\n";
    return 2;
  }
}
