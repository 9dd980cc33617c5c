// Prints the four estimators side by side on a few characteristic groups.

#include <cstdio>
#include <vector>

#include "guae/advantage.hpp"

int main() {
  using guae::EstimatorVariant;
  const std::vector<std::vector<double>> groups = {
      {1, 1, 1, 1, 1, 1, 1, 1},
      {0, 0, 0, 0, 0, 0, 0, 0},
      {1, 0, 0, 0, 0, 0, 0, 0},
      {1, 1, 1, 1, 0, 0, 0, 0},
      {0.85, 0.85, 0.9, 0.85, 0.85, 0.85, 0.85, 0.85},
  };
  for (const auto& g : groups) {
    std::printf("rewards:");
    for (double r : g) std::printf(" %.2f", r);
    std::printf("\n");
    for (auto v : {EstimatorVariant::BaseGrpo, EstimatorVariant::AnchorOnly, EstimatorVariant::VatOnly,
                   EstimatorVariant::GuAE}) {
      guae::EstimatorConfig cfg;
      cfg.variant = v;
      const auto res = guae::estimate(g, cfg);
      std::printf("  %-12s mu=%.4f sigma=%.4f", std::string(guae::to_string(v)).c_str(), res.mu, res.sigma);
      if (res.exponent) std::printf(" p=%.4f", *res.exponent);
      std::printf("  A[0]=%+.4f A[last]=%+.4f\n", res.advantages.front(), res.advantages.back());
    }
  }
  return 0;
}
