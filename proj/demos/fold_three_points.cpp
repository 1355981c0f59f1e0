// Folds three constant generators into one network and shows which input
// ranges of the selector coordinate pick which point.

#include <iostream>

#include "ganlab/dist/distributions.hpp"
#include "ganlab/folding/fold.hpp"

int main() {
  using namespace ganlab;
  const auto support = dist::CirclePointTarget::support();
  const nn::Vector shift = nn::Vector::Constant(2, 1.0);  // keep ReLU outputs positive

  std::vector<nn::MultilayerNet> comps;
  for (nn::Index t = 0; t < support.size(); ++t) comps.push_back(folding::constant_generator(support.row(t) + shift, 1));
  const auto fg = folding::fold(comps, 0.01);

  std::cout << "cuts:";
  for (double z : fg.cuts) std::cout << " " << z;
  std::cout << "\nramp width " << fg.ramp_width << ", " << fg.param_count() << " parameters\n\n";
  for (double h0 : {-2.0, -0.5, -0.431, 0.0, 0.431, 0.5, 2.0}) {
    const nn::Vector y = fg.net.forward(nn::Vector{{h0, 0.0}}) - shift;
    std::cout << "h0 = " << h0 << "  ->  (" << y[0] << ", " << y[1] << ")\n";
  }
}
