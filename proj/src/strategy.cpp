#include "relbandit/strategy.hpp"

#include <algorithm>
#include <stdexcept>

namespace relbandit {

namespace {

template <typename Future>
PsiVector compute_psi_impl(const History& history, const Future& rollout, Context x_t,
                           double gamma, int num_actions, ErmOracle& oracle) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("compute_psi: gamma must be in (0,1]");
  }
  const double spike = static_cast<double>(num_actions) / gamma;
  ErmQuery query;
  query.past = history;
  query.current_context = x_t;
  if constexpr (std::is_same_v<Future, Rollout>) {
    query.future = rollout.steps;
  } else {
    query.dense_future = rollout.steps;
  }

  PsiVector result;
  result.psi.reserve(static_cast<std::size_t>(num_actions) + 1);
  result.psi.push_back(oracle.value_of_erm(query).value);
  for (int i = 0; i < num_actions; ++i) {
    query.spike = SpikeOverride{i, spike};
    result.psi.push_back(oracle.value_of_erm(query).value);
  }
  return result;
}

}  // namespace

PsiVector compute_psi(const History& history, const Rollout& rollout, Context x_t, double gamma,
                      int num_actions, ErmOracle& oracle) {
  return compute_psi_impl(history, rollout, x_t, gamma, num_actions, oracle);
}

PsiVector compute_psi(const History& history, const DenseRollout& rollout, Context x_t,
                      double gamma, int num_actions, ErmOracle& oracle) {
  return compute_psi_impl(history, rollout, x_t, gamma, num_actions, oracle);
}

std::vector<double> eta_from_psi(const PsiVector& psi, double gamma, int num_actions) {
  if (psi.num_actions() != num_actions) {
    throw std::invalid_argument("eta_from_psi: psi has wrong length");
  }
  std::vector<double> eta(static_cast<std::size_t>(num_actions));
  for (int i = 0; i < num_actions; ++i) {
    eta[static_cast<std::size_t>(i)] =
        gamma * (psi.psi[static_cast<std::size_t>(i) + 1] - psi.psi[0]) /
        static_cast<double>(num_actions);
  }
  return eta;
}

ActionDistribution water_fill(const std::vector<double>& eta) {
  if (eta.empty()) throw std::invalid_argument("water_fill: empty eta");
  const std::size_t k = eta.size();
  std::vector<double> q(k, 0.0);
  double remaining = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    q[i] = std::min(std::max(eta[i], 0.0), remaining);
    remaining -= q[i];
  }
  if (remaining > 0.0) {
    const double share = remaining / static_cast<double>(k);
    for (double& v : q) v += share;
  }
  return ActionDistribution(std::move(q));
}

ActionDistribution mix_exploration(const ActionDistribution& q_star, double gamma,
                                   int num_actions) {
  if (q_star.size() != num_actions) {
    throw std::invalid_argument("mix_exploration: distribution size != K");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("mix_exploration: gamma must be in [0,1]");
  }
  const double floor = gamma / static_cast<double>(num_actions);
  std::vector<double> q(static_cast<std::size_t>(num_actions));
  for (int i = 0; i < num_actions; ++i) {
    q[static_cast<std::size_t>(i)] = (1.0 - gamma) * q_star[i] + floor;
  }
  return ActionDistribution(std::move(q));
}

}  // namespace relbandit
