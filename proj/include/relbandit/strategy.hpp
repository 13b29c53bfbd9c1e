#pragma once

#include <vector>

#include "relbandit/core.hpp"
#include "relbandit/oracle.hpp"

namespace relbandit {

// ERM values of the K+1 probe queries for one round: index 0 is the no-spike
// baseline, index i >= 1 injects a spike of height K/gamma at action i-1.
// Any psi[i] exceeds psi[0] by at most K/gamma.
struct PsiVector {
  std::vector<double> psi;

  int num_actions() const { return static_cast<int>(psi.size()) - 1; }
};

// K+1 value-of-ERM calls sharing one history and one rollout.
PsiVector compute_psi(const History& history, const Rollout& rollout, Context x_t, double gamma,
                      int num_actions, ErmOracle& oracle);

PsiVector compute_psi(const History& history, const DenseRollout& rollout, Context x_t,
                      double gamma, int num_actions, ErmOracle& oracle);

// Per-arm caps eta_i = gamma * (psi_i - psi_0) / K.
std::vector<double> eta_from_psi(const PsiVector& psi, double gamma, int num_actions);

// Allocates probability up to each cap in ascending index order and spreads
// any remainder uniformly over all K coordinates. The result minimizes
// sum_i (q(i) - eta_i)^+ over the simplex; this is q*_t.
ActionDistribution water_fill(const std::vector<double>& eta);

// q_t = (1 - gamma) * q* + (gamma / K) * 1, so min_i q_t(i) >= gamma/K.
ActionDistribution mix_exploration(const ActionDistribution& q_star, double gamma,
                                   int num_actions);

}  // namespace relbandit
