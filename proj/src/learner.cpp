#include "relbandit/learner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "relbandit/estimator.hpp"
#include "relbandit/relaxation.hpp"
#include "relbandit/strategy.hpp"

namespace relbandit {

namespace {

CostVector fetch_cost(const CostCallback& cost_of, const ActionDistribution& q, int num_actions) {
  CostVector c = cost_of(q);
  if (c.size() != num_actions) {
    throw ContractError("environment returned a cost vector of length " +
                        std::to_string(c.size()) + ", expected " + std::to_string(num_actions));
  }
  return c;
}

template <typename RolloutType>
RoundRecord relaxation_round(Context x, const CostCallback& cost_of, ErmOracle& oracle,
                             const ContextDistribution& dist, int horizon, double gamma,
                             int num_actions, Rng& rollout_rng, Rng& action_rng, Rng& coin_rng,
                             History& history, int& next_round) {
  if (next_round > horizon) {
    throw std::invalid_argument("play_round: past the configured horizon");
  }
  const int t = next_round;
  const std::int64_t calls_before = oracle.call_count();

  RolloutType rollout;
  if constexpr (std::is_same_v<RolloutType, Rollout>) {
    rollout = sample_rollout(t, horizon, num_actions, gamma, dist, rollout_rng);
  } else {
    rollout = sample_dense_rollout(t, horizon, num_actions, gamma, dist, rollout_rng);
  }
  const PsiVector psi = compute_psi(history, rollout, x, gamma, num_actions, oracle);
  const ActionDistribution q_star = water_fill(eta_from_psi(psi, gamma, num_actions));
  const ActionDistribution q = mix_exploration(q_star, gamma, num_actions);

  const CostVector c = fetch_cost(cost_of, q, num_actions);
  const int action = action_rng.categorical(q.probs());
  const double observed = c[action];
  const EstimatedCost estimate = estimate_cost(observed, action, q, gamma, num_actions, coin_rng);

  history.push_back({x, estimate});
  ++next_round;
  return RoundRecord{t,        x,        q, action, observed, estimate,
                     static_cast<int>(oracle.call_count() - calls_before)};
}

}  // namespace

RelaxBanditLearner::RelaxBanditLearner(const PolicyClass& policies, ContextDistribution dist,
                                       int horizon, double gamma, Rng& rollout_rng,
                                       Rng& action_rng, Rng& coin_rng)
    : oracle_(make_exhaustive_oracle(policies)),
      dist_(std::move(dist)),
      horizon_(horizon),
      gamma_(gamma),
      num_actions_(policies.num_actions()),
      rollout_rng_(rollout_rng),
      action_rng_(action_rng),
      coin_rng_(coin_rng) {
  if (horizon_ < 1) throw std::invalid_argument("RelaxBanditLearner: horizon must be >= 1");
  if (!(gamma_ > 0.0 && gamma_ <= 1.0)) {
    throw std::invalid_argument("RelaxBanditLearner: gamma must be in (0,1]");
  }
  if (dist_.num_contexts() != policies.num_contexts()) {
    throw std::invalid_argument("RelaxBanditLearner: context distribution size != X");
  }
}

RoundRecord RelaxBanditLearner::play_round(Context x, const CostCallback& cost_of) {
  return relaxation_round<Rollout>(x, cost_of, *oracle_, dist_, horizon_, gamma_, num_actions_,
                                   rollout_rng_, action_rng_, coin_rng_, history_, next_round_);
}

FullRademacherLearner::FullRademacherLearner(const PolicyClass& policies, ContextDistribution dist,
                                             int horizon, double gamma, Rng& rollout_rng,
                                             Rng& action_rng, Rng& coin_rng)
    : oracle_(make_exhaustive_oracle(policies)),
      dist_(std::move(dist)),
      horizon_(horizon),
      gamma_(gamma),
      num_actions_(policies.num_actions()),
      rollout_rng_(rollout_rng),
      action_rng_(action_rng),
      coin_rng_(coin_rng) {
  if (horizon_ < 1) throw std::invalid_argument("FullRademacherLearner: horizon must be >= 1");
  if (!(gamma_ > 0.0 && gamma_ <= 1.0)) {
    throw std::invalid_argument("FullRademacherLearner: gamma must be in (0,1]");
  }
  if (dist_.num_contexts() != policies.num_contexts()) {
    throw std::invalid_argument("FullRademacherLearner: context distribution size != X");
  }
}

RoundRecord FullRademacherLearner::play_round(Context x, const CostCallback& cost_of) {
  return relaxation_round<DenseRollout>(x, cost_of, *oracle_, dist_, horizon_, gamma_,
                                        num_actions_, rollout_rng_, action_rng_, coin_rng_,
                                        history_, next_round_);
}

Exp4Learner::Exp4Learner(PolicyClass policies, int horizon, double gamma, double lambda,
                         Rng& action_rng, Rng& coin_rng)
    : policies_(std::move(policies)),
      horizon_(horizon),
      gamma_(gamma),
      lambda_(lambda),
      action_rng_(action_rng),
      coin_rng_(coin_rng),
      cumulative_est_loss_(static_cast<std::size_t>(policies_.size()), 0.0) {
  if (horizon_ < 1) throw std::invalid_argument("Exp4Learner: horizon must be >= 1");
  if (!(gamma_ > 0.0 && gamma_ <= 1.0)) {
    throw std::invalid_argument("Exp4Learner: gamma must be in (0,1]");
  }
  if (lambda_ <= 0.0) {
    lambda_ = std::sqrt(std::log(static_cast<double>(policies_.size())) /
                        (static_cast<double>(horizon_) * policies_.num_actions()));
  }
}

RoundRecord Exp4Learner::play_round(Context x, const CostCallback& cost_of) {
  const int t = next_round_;
  const int k = policies_.num_actions();

  // Weighted policy vote, normalized in log space so weights never underflow.
  const double min_loss =
      *std::min_element(cumulative_est_loss_.begin(), cumulative_est_loss_.end());
  std::vector<double> vote(static_cast<std::size_t>(k), 0.0);
  double total = 0.0;
  for (int p = 0; p < policies_.size(); ++p) {
    const double w = std::exp(-lambda_ * (cumulative_est_loss_[static_cast<std::size_t>(p)] -
                                          min_loss));
    vote[static_cast<std::size_t>(policy_action(policies_[p], x))] += w;
    total += w;
  }
  std::vector<double> probs(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    probs[static_cast<std::size_t>(i)] =
        (1.0 - gamma_) * vote[static_cast<std::size_t>(i)] / total + gamma_ / k;
  }
  const ActionDistribution q(std::move(probs));

  const CostVector c = fetch_cost(cost_of, q, k);
  const int action = action_rng_.categorical(q.probs());
  const double observed = c[action];
  const EstimatedCost estimate = estimate_cost(observed, action, q, gamma_, k, coin_rng_);

  for (int p = 0; p < policies_.size(); ++p) {
    cumulative_est_loss_[static_cast<std::size_t>(p)] +=
        estimate.at(policy_action(policies_[p], x));
  }
  ++next_round_;
  return RoundRecord{t, x, q, action, observed, estimate, 0};
}

EpsilonGreedyLearner::EpsilonGreedyLearner(const PolicyClass& policies, double epsilon,
                                           Rng& action_rng, Rng& coin_rng, History warm_start)
    : oracle_(make_exhaustive_oracle(policies)),
      epsilon_(epsilon),
      num_actions_(policies.num_actions()),
      action_rng_(action_rng),
      coin_rng_(coin_rng),
      history_(std::move(warm_start)) {
  if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) {
    throw std::invalid_argument("EpsilonGreedyLearner: epsilon must be in [0,1]");
  }
}

RoundRecord EpsilonGreedyLearner::play_round(Context x, const CostCallback& cost_of) {
  const int t = next_round_;
  const std::int64_t calls_before = oracle_->call_count();

  std::vector<double> probs(static_cast<std::size_t>(num_actions_),
                            epsilon_ / static_cast<double>(num_actions_));
  if (epsilon_ < 1.0) {
    ErmQuery query;
    query.past = history_;
    const int greedy =
        policy_action(oracle_->policy_class()[oracle_->value_of_erm(query).argmin_policy], x);
    probs[static_cast<std::size_t>(greedy)] += 1.0 - epsilon_;
  }
  const ActionDistribution q(std::move(probs));

  const CostVector c = fetch_cost(cost_of, q, num_actions_);
  const int action = action_rng_.categorical(q.probs());
  const double observed = c[action];
  // The inverse-propensity estimate needs an exploration floor; without one
  // there is nothing to estimate and the history stays untouched.
  EstimatedCost estimate = EstimatedCost::zero();
  if (epsilon_ > 0.0) {
    estimate = estimate_cost(observed, action, q, epsilon_, num_actions_, coin_rng_);
    history_.push_back({x, estimate});
  }
  ++next_round_;
  return RoundRecord{t,        x,        q, action, observed, estimate,
                     static_cast<int>(oracle_->call_count() - calls_before)};
}

EpisodeResult run_episode(Learner& learner, Adversary& adversary, const ContextDistribution& dist,
                          const PolicyClass& policies, int horizon, Rng& context_rng) {
  if (horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
  if (learner.horizon() > 0 && learner.horizon() != horizon) {
    throw std::invalid_argument("run_episode: learner tuned for horizon " +
                                std::to_string(learner.horizon()) + ", asked to run " +
                                std::to_string(horizon));
  }
  if (dist.num_contexts() != policies.num_contexts()) {
    throw std::invalid_argument("run_episode: context distribution size != X");
  }

  EpisodeResult result;
  result.records.reserve(static_cast<std::size_t>(horizon));
  std::vector<double> policy_cum(static_cast<std::size_t>(policies.size()), 0.0);
  double cum_expected = 0.0;
  double cum_realized = 0.0;

  for (int t = 1; t <= horizon; ++t) {
    const Context x = sample_context(dist, context_rng);
    CostVector round_cost(std::vector<double>(static_cast<std::size_t>(policies.num_actions()),
                                              0.0));
    bool cost_seen = false;
    RoundRecord record = learner.play_round(x, [&](const ActionDistribution& q) {
      CostVector c = adversary.cost(t, x, q);
      round_cost = c;
      cost_seen = true;
      return c;
    });
    if (!cost_seen) throw ContractError("run_episode: learner never queried the environment");

    double expected = 0.0;
    for (int i = 0; i < policies.num_actions(); ++i) expected += record.q[i] * round_cost[i];
    cum_expected += expected;
    cum_realized += record.observed_cost;
    for (int p = 0; p < policies.size(); ++p) {
      policy_cum[static_cast<std::size_t>(p)] += round_cost[policy_action(policies[p], x)];
    }
    const double best_so_far = *std::min_element(policy_cum.begin(), policy_cum.end());

    result.contexts.push_back(x);
    result.costs.push_back(round_cost);
    result.expected_round_cost.push_back(expected);
    result.cum_expected_regret.push_back(cum_expected - best_so_far);
    result.records.push_back(std::move(record));
  }

  const auto [benchmark, best_policy] =
      best_fixed_policy_cost(result.contexts, result.costs, policies);
  result.regret.benchmark_cost = benchmark;
  result.regret.benchmark_policy = best_policy;
  result.regret.expected_regret = cum_expected - benchmark;
  result.regret.realized_regret = cum_realized - benchmark;
  return result;
}

bool gamma_tuning_in_guaranteed_regime(int horizon, int num_actions, int pi_size) {
  return static_cast<double>(horizon) >
         4.0 * static_cast<double>(num_actions) * std::log(static_cast<double>(pi_size));
}

double default_gamma(int horizon, int num_actions, int pi_size) {
  if (horizon < 1) throw std::invalid_argument("default_gamma: horizon must be >= 1");
  if (num_actions < 2) throw std::invalid_argument("default_gamma: need at least 2 actions");
  if (pi_size < 2) {
    throw std::invalid_argument("default_gamma: need at least 2 policies (log|Pi| = 0 otherwise)");
  }
  if (!gamma_tuning_in_guaranteed_regime(horizon, num_actions, pi_size)) {
    std::cerr << "warning: horizon " << horizon << " <= 4*K*ln|Pi|; the tuned gamma is clamped "
              << "and the regret guarantee does not apply\n";
  }
  const double g = std::cbrt(4.0 * static_cast<double>(num_actions) *
                             std::log(static_cast<double>(pi_size)) /
                             static_cast<double>(horizon));
  return std::min(1.0, g);
}

}  // namespace relbandit
