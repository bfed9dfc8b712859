//! Semiclassical bifurcation analysis of the reference instance: the cusp
//! solver locates the critical driver strength, and the detectors confirm
//! that a super-critical driver removes both the local and the global
//! bifurcation of the reduced potential.

#include <cstdio>
#include <vector>

#include "qaa/qaa.hpp"

int main() {
  const qaa::HwpInstance inst = qaa::HwpInstance::reference_instance();

  const qaa::BifurcationSolution sol = qaa::solve_a3(inst.beta);
  std::printf("cusp solver on p = (0, 3, 1, 1):\n");
  std::printf("  tau_c = %.5f, gamma4_c = %.5f, x_c = %.4f (%s, residual %.3e)\n",
              sol.tau_c, sol.gamma4_c, sol.x_c, qaa::to_string(sol.kind),
              sol.residual);
  std::printf("  converged: %s\n", sol.converged ? "yes" : "no");

  const qaa::CostClassification cost = qaa::classify_cost(inst.beta);
  std::printf("cost shape: %s, global minimizer q* = %+.1f\n",
              qaa::to_string(cost.shape).c_str(), cost.q_star);

  std::vector<double> taus(197);
  for (std::size_t i = 0; i < taus.size(); ++i)
    taus[i] = 0.01 + 0.98 * static_cast<double>(i) / (taus.size() - 1);

  for (const double g4 : {0.0, -2.0, -8.0}) {
    qaa::GammaCoefficients g;
    g.g4 = g4;
    const qaa::EffectiveModel model(inst, g);
    const auto local = qaa::detect_local_bifurcation(model, taus);
    const auto global = qaa::detect_global_bifurcation(model, taus);
    std::printf("gamma4 = %+5.1f : %zu local, %zu global bifurcation events\n",
                g4, local.size(), global.size());
  }
  return 0;
}
