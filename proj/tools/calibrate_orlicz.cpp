// Prints the largest ||f||_Phi^2 (1 + log(||f||_2/||f||_1)) / ||f||_2^2 seen on
// the reference family of each acceptance model.

#include <cstdio>
#include <cstdlib>

#include "ipslab/functionals.hpp"
#include "ipslab/reference_models.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2024;
  const std::size_t count = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2000;
  double worst = 0.0;
  for (const auto& [name, model] : ipslab::reference::acceptance_models()) {
    const auto family = ipslab::reference::orlicz_reference_family(model, count, seed);
    const double m = ipslab::calibrate_orlicz_l2_constant(model.mu(), family);
    std::printf("%-20s %.6f\n", name.c_str(), m);
    worst = std::max(worst, m);
  }
  std::printf("%-20s %.6f\n", "max", worst);
  return 0;
}
