#pragma once

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "relbandit/core.hpp"
#include "relbandit/envs.hpp"
#include "relbandit/oracle.hpp"
#include "relbandit/rng.hpp"

namespace relbandit {

// Maps q_t to the adversary's full cost vector for the round. Invoked before
// the action is sampled; the learner itself only reads the chosen entry.
using CostCallback = std::function<CostVector(const ActionDistribution& q)>;

class Learner {
 public:
  virtual ~Learner() = default;

  virtual RoundRecord play_round(Context x, const CostCallback& cost_of) = 0;
  virtual std::string_view name() const = 0;

  // Horizon the learner was tuned for; 0 means any.
  virtual int horizon() const { return 0; }
};

// Online learner that plays the water-filled distribution induced by one
// sampled hallucinated future per round, mixed with uniform exploration.
// Issues exactly K+1 value-of-ERM calls per round.
class RelaxBanditLearner final : public Learner {
 public:
  RelaxBanditLearner(const PolicyClass& policies, ContextDistribution dist, int horizon,
                     double gamma, Rng& rollout_rng, Rng& action_rng, Rng& coin_rng);

  RoundRecord play_round(Context x, const CostCallback& cost_of) override;
  std::string_view name() const override { return "relax_bandit"; }
  int horizon() const override { return horizon_; }

  double gamma() const { return gamma_; }
  ErmOracle& oracle() { return *oracle_; }
  const History& history() const { return history_; }

 private:
  std::unique_ptr<ErmOracle> oracle_;
  ContextDistribution dist_;
  int horizon_;
  double gamma_;
  int num_actions_;
  Rng& rollout_rng_;
  Rng& action_rng_;
  Rng& coin_rng_;
  History history_;
  int next_round_ = 1;
};

// Same pipeline with dense hallucinations: every arm gets an independent
// Rademacher sign in each hallucinated round.
class FullRademacherLearner final : public Learner {
 public:
  FullRademacherLearner(const PolicyClass& policies, ContextDistribution dist, int horizon,
                        double gamma, Rng& rollout_rng, Rng& action_rng, Rng& coin_rng);

  RoundRecord play_round(Context x, const CostCallback& cost_of) override;
  std::string_view name() const override { return "full_rademacher"; }
  int horizon() const override { return horizon_; }

  double gamma() const { return gamma_; }
  ErmOracle& oracle() { return *oracle_; }

 private:
  std::unique_ptr<ErmOracle> oracle_;
  ContextDistribution dist_;
  int horizon_;
  double gamma_;
  int num_actions_;
  Rng& rollout_rng_;
  Rng& action_rng_;
  Rng& coin_rng_;
  History history_;
  int next_round_ = 1;
};

// Exponential weights over the policy class with gamma-uniform mixing and the
// same discretized cost estimates. Enumerates the class directly, so it makes
// no oracle calls; the baseline the oracle-based learners are compared to.
class Exp4Learner final : public Learner {
 public:
  // lambda <= 0 selects the default rate sqrt(ln|Pi| / (T*K)).
  Exp4Learner(PolicyClass policies, int horizon, double gamma, double lambda, Rng& action_rng,
              Rng& coin_rng);

  RoundRecord play_round(Context x, const CostCallback& cost_of) override;
  std::string_view name() const override { return "exp4"; }
  int horizon() const override { return horizon_; }

  double lambda() const { return lambda_; }

 private:
  PolicyClass policies_;
  int horizon_;
  double gamma_;
  double lambda_;
  Rng& action_rng_;
  Rng& coin_rng_;
  std::vector<double> cumulative_est_loss_;
  int next_round_ = 1;
};

// Uniform exploration with probability epsilon, otherwise the ERM policy on
// past estimates. At most one oracle call per round.
class EpsilonGreedyLearner final : public Learner {
 public:
  EpsilonGreedyLearner(const PolicyClass& policies, double epsilon, Rng& action_rng, Rng& coin_rng,
                       History warm_start = {});

  RoundRecord play_round(Context x, const CostCallback& cost_of) override;
  std::string_view name() const override { return "epsilon_greedy"; }

  ErmOracle& oracle() { return *oracle_; }

 private:
  std::unique_ptr<ErmOracle> oracle_;
  double epsilon_;
  int num_actions_;
  Rng& action_rng_;
  Rng& coin_rng_;
  History history_;
  int next_round_ = 1;
};

struct RegretReport {
  double expected_regret = 0.0;  // sum_t <q_t, c_t> - benchmark
  double realized_regret = 0.0;  // sum_t c_t(chosen_t) - benchmark
  double benchmark_cost = 0.0;   // min_pi sum_t c_t(pi(x_t))
  int benchmark_policy = 0;
};

struct EpisodeResult {
  std::vector<RoundRecord> records;
  std::vector<Context> contexts;
  std::vector<CostVector> costs;                // full adversary vectors
  std::vector<double> expected_round_cost;      // <q_t, c_t>
  std::vector<double> cum_expected_regret;      // against the best policy so far
  RegretReport regret;
};

// Runs `horizon` rounds of learner vs adversary with contexts drawn from
// `dist`, and reports regret against the policy class benchmark.
EpisodeResult run_episode(Learner& learner, Adversary& adversary, const ContextDistribution& dist,
                          const PolicyClass& policies, int horizon, Rng& context_rng);

// Horizon-tuned exploration rate min(1, (4 K ln|Pi| / T)^(1/3)). Warns on
// stderr when T is too small for the tuning's regret guarantee to apply.
double default_gamma(int horizon, int num_actions, int pi_size);

// True when T > 4 K ln|Pi|, the regime the tuning is designed for.
bool gamma_tuning_in_guaranteed_regime(int horizon, int num_actions, int pi_size);

}  // namespace relbandit
