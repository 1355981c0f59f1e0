// Trains a small generator mixture on the 8-mode ring and prints how the
// mixture weights and mode coverage evolve.

#include <cstdlib>
#include <iostream>

#include "ganlab/mixgan/train.hpp"

int main(int argc, char** argv) {
  ganlab::mixgan::TrainConfig cfg;
  cfg.T = 4;
  cfg.steps = argc > 1 ? std::atoi(argv[1]) : 2000;
  cfg.learning_rate = 1e-3;
  cfg.eval_every = 250;
  cfg.phi = ganlab::div::MeasuringFunction::log_shifted();
  cfg.seed = 7;

  const auto res = ganlab::mixgan::train(cfg);
  std::cout << "step  objective  coverage  weights\n";
  for (const auto& row : res.log) {
    std::cout << row.step << "  " << row.objective << "  " << row.coverage << "/8 ";
    for (auto i = 0; i < row.gen_weights.size(); ++i) std::cout << " " << row.gen_weights[i];
    std::cout << "\n";
  }
  if (res.aborted) std::cout << "aborted: " << res.abort_reason << "\n";
}
