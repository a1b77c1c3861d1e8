#ifndef SHB_GRADCHECK_HPP
#define SHB_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "shb/common.hpp"
#include "shb/problems.hpp"

namespace shb {

// Central-difference check of every component gradient at `trials` random
// points, h_j = 1e-6 (1 + |x_j|). Returns the worst relative error
// max_j |g_j - g_fd_j| / max(1, max_j |g_j|) over all (point, component)
// pairs.
inline double finite_diff_check(const FiniteSumProblem& problem, int trials,
                                std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 3));
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  Vector x(problem.dim);
  for (int trial = 0; trial < trials; ++trial) {
    for (int j = 0; j < problem.dim; ++j) x(j) = gauss(rng);
    for (const Component& comp : problem.components) {
      const Vector g = comp.gradient(x);
      const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
      for (int j = 0; j < problem.dim; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(x(j)));
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const double fd = (comp.value(xp) - comp.value(xm)) / (2.0 * h);
        worst = std::max(worst, std::abs(g(j) - fd) / scale);
      }
    }
  }
  return worst;
}

}  // namespace shb

#endif  // SHB_GRADCHECK_HPP
