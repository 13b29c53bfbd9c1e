#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "relbandit/core.hpp"
#include "relbandit/rng.hpp"

namespace relbandit {

// Known categorical distribution over the finite context universe.
class ContextDistribution {
 public:
  explicit ContextDistribution(std::vector<double> probs);

  static ContextDistribution uniform(int num_contexts);

  int num_contexts() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

Context sample_context(const ContextDistribution& dist, Rng& rng);

// Cost-generating adversary. `cost` is invoked with the learner's q_t before
// the action is sampled, so no rule can ever observe the realized action.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual CostVector cost(int t, Context x, const ActionDistribution& q) = 0;
  virtual std::string_view name() const = 0;
};

// Plays back a fixed list of cost vectors, one per round.
class FixedSequenceAdversary final : public Adversary {
 public:
  explicit FixedSequenceAdversary(std::vector<CostVector> costs);

  CostVector cost(int t, Context x, const ActionDistribution& q) override;
  std::string_view name() const override { return "fixed"; }

 private:
  std::vector<CostVector> costs_;
};

// Per-context Bernoulli losses (or the deterministic means when noise is off).
class StochasticAdversary final : public Adversary {
 public:
  enum class Noise { kBernoulli, kNone };

  StochasticAdversary(std::vector<std::vector<double>> means_by_context, Noise noise, Rng& rng);

  CostVector cost(int t, Context x, const ActionDistribution& q) override;
  std::string_view name() const override { return "stochastic"; }

 private:
  std::vector<std::vector<double>> means_;
  Noise noise_;
  Rng& rng_;
};

// Cost 1 on the learner's modal action, 0 elsewhere.
class PunishModeAdversary final : public Adversary {
 public:
  explicit PunishModeAdversary(int num_actions) : num_actions_(num_actions) {}

  CostVector cost(int t, Context x, const ActionDistribution& q) override;
  std::string_view name() const override { return "punish_mode"; }

 private:
  int num_actions_;
};

// Cost 1 wherever the learner plays above the uniform rate.
class PunishAboveUniformAdversary final : public Adversary {
 public:
  explicit PunishAboveUniformAdversary(int num_actions) : num_actions_(num_actions) {}

  CostVector cost(int t, Context x, const ActionDistribution& q) override;
  std::string_view name() const override { return "punish_above_uniform"; }

 private:
  int num_actions_;
};

// Keeps the hindsight-best policy cheap: cost 0 on that policy's action at
// the shown context, 1 elsewhere, so the learner has to track it.
class BestPolicyChaserAdversary final : public Adversary {
 public:
  explicit BestPolicyChaserAdversary(PolicyClass policies);

  CostVector cost(int t, Context x, const ActionDistribution& q) override;
  std::string_view name() const override { return "best_policy_chaser"; }

 private:
  PolicyClass policies_;
  std::vector<double> cumulative_;
};

// Arbitrary rule; raw outputs are validated and a bad rule is reported as a
// broken contract rather than fed downstream.
class CustomRuleAdversary final : public Adversary {
 public:
  using Rule = std::function<std::vector<double>(int t, Context x, const ActionDistribution& q)>;

  CustomRuleAdversary(std::string name, Rule rule)
      : name_(std::move(name)), rule_(std::move(rule)) {}

  CostVector cost(int t, Context x, const ActionDistribution& q) override;
  std::string_view name() const override { return name_; }

 private:
  std::string name_;
  Rule rule_;
};

// T rows, K comma-separated columns, values in [0,1].
std::vector<CostVector> load_cost_csv(const std::string& path, int num_actions);

}  // namespace relbandit
