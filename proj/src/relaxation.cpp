#include "relbandit/relaxation.hpp"

#include <stdexcept>
#include <string>

namespace relbandit {

namespace {

// t = 0 is allowed: it yields the length-T hallucination behind the empty
// relaxation value.
void check_round(int t, int horizon, double gamma) {
  if (t < 0 || t > horizon) {
    throw std::invalid_argument("sample_rollout: round " + std::to_string(t) +
                                " outside horizon " + std::to_string(horizon));
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("sample_rollout: gamma must be in (0,1]");
  }
}

}  // namespace

Rollout sample_rollout(int t, int horizon, int num_actions, double gamma,
                       const ContextDistribution& dist, Rng& rng) {
  check_round(t, horizon, gamma);
  const double spike = static_cast<double>(num_actions) / gamma;
  Rollout rollout;
  rollout.steps.reserve(static_cast<std::size_t>(horizon - t));
  for (int tau = t + 1; tau <= horizon; ++tau) {
    const Context x = sample_context(dist, rng);
    const int arm = rng.uniform_int(num_actions);
    const int sign = rng.rademacher();
    const double scale = rng.bernoulli(gamma) ? spike : 0.0;
    rollout.steps.emplace_back(x, arm, sign, scale);
  }
  return rollout;
}

DenseRollout sample_dense_rollout(int t, int horizon, int num_actions, double gamma,
                                  const ContextDistribution& dist, Rng& rng) {
  check_round(t, horizon, gamma);
  const double spike = static_cast<double>(num_actions) / gamma;
  DenseRollout rollout;
  rollout.steps.reserve(static_cast<std::size_t>(horizon - t));
  for (int tau = t + 1; tau <= horizon; ++tau) {
    DenseHallucinationStep step;
    step.context = sample_context(dist, rng);
    step.signs.resize(static_cast<std::size_t>(num_actions));
    for (int i = 0; i < num_actions; ++i) {
      step.signs[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(rng.rademacher());
    }
    step.scale = rng.bernoulli(gamma) ? spike : 0.0;
    rollout.steps.push_back(std::move(step));
  }
  return rollout;
}

double relaxation_random_value(const History& history, const Rollout& rollout, int t, int horizon,
                               double gamma, ErmOracle& oracle) {
  if (static_cast<int>(history.size()) != t) {
    throw std::invalid_argument("relaxation_random_value: history length != t");
  }
  if (rollout.size() != horizon - t) {
    throw std::invalid_argument("relaxation_random_value: rollout length != T - t");
  }
  ErmQuery query;
  query.past = history;
  query.future = rollout.steps;
  return gamma * static_cast<double>(horizon - t) - oracle.value_of_erm(query).value;
}

double relaxation_random_value(const History& history, const DenseRollout& rollout, int t,
                               int horizon, double gamma, ErmOracle& oracle) {
  if (static_cast<int>(history.size()) != t) {
    throw std::invalid_argument("relaxation_random_value: history length != t");
  }
  if (rollout.size() != horizon - t) {
    throw std::invalid_argument("relaxation_random_value: rollout length != T - t");
  }
  ErmQuery query;
  query.past = history;
  query.dense_future = rollout.steps;
  return gamma * static_cast<double>(horizon - t) - oracle.value_of_erm(query).value;
}

}  // namespace relbandit
