#include "relbandit/core.hpp"

#include <algorithm>
#include <cmath>

#include "relbandit/rng.hpp"

namespace relbandit {

namespace {

// Validates a raw probability vector and closes the floating-point residual:
// after dividing by the observed sum, the largest coordinate is adjusted so
// the entries sum to exactly 1.
std::vector<double> validated_simplex(std::vector<double> probs, const char* what) {
  if (probs.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty probability vector");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument(std::string(what) + ": negative or NaN entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    throw std::invalid_argument(std::string(what) + ": entries sum to " + std::to_string(sum) +
                                ", expected 1 within 1e-9");
  }
  for (double& p : probs) p /= sum;
  std::size_t top = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[top]) top = i;
  }
  double rest = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i != top) rest += probs[i];
  }
  probs[top] = 1.0 - rest;
  return probs;
}

}  // namespace

CostVector::CostVector(std::vector<double> costs) : costs_(std::move(costs)) {
  if (costs_.empty()) throw std::invalid_argument("CostVector: empty");
  for (double c : costs_) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw std::invalid_argument("CostVector: entry outside [0,1]");
    }
  }
}

Policy::Policy(std::vector<int> table) : table_(std::move(table)) {
  if (table_.empty()) throw std::invalid_argument("Policy: empty table");
  for (int a : table_) {
    if (a < 0) throw std::invalid_argument("Policy: negative action index");
  }
}

int policy_action(const Policy& policy, Context context) {
  if (context.id < 0 || context.id >= policy.num_contexts()) {
    throw std::out_of_range("policy_action: context id " + std::to_string(context.id) +
                            " outside universe of size " + std::to_string(policy.num_contexts()));
  }
  return policy.table()[static_cast<std::size_t>(context.id)];
}

PolicyClass::PolicyClass(std::vector<Policy> policies, int num_actions)
    : policies_(std::move(policies)), num_actions_(num_actions) {
  if (policies_.empty()) throw std::invalid_argument("PolicyClass: must be nonempty");
  if (num_actions_ < 1) throw std::invalid_argument("PolicyClass: num_actions must be >= 1");
  num_contexts_ = policies_.front().num_contexts();
  for (const Policy& p : policies_) {
    if (p.num_contexts() != num_contexts_) {
      throw std::invalid_argument("PolicyClass: policies disagree on context universe size");
    }
    for (int a : p.table()) {
      if (a >= num_actions_) {
        throw std::invalid_argument("PolicyClass: action index exceeds num_actions");
      }
    }
  }
}

PolicyClass PolicyClass::random(int num_contexts, int num_actions, int size, std::uint64_t seed) {
  if (num_contexts < 1 || num_actions < 1 || size < 1) {
    throw std::invalid_argument("PolicyClass::random: sizes must be positive");
  }
  // v1 generation scheme; bump the tag if the draw layout ever changes.
  constexpr std::uint64_t kGenV1Tag = 0x706f6c5f67656e31ULL;
  Rng rng(mix_seed(seed, kGenV1Tag));
  std::vector<Policy> policies;
  policies.reserve(static_cast<std::size_t>(size));
  for (int p = 0; p < size; ++p) {
    std::vector<int> table(static_cast<std::size_t>(num_contexts));
    for (int x = 0; x < num_contexts; ++x) {
      table[static_cast<std::size_t>(x)] = rng.uniform_int(num_actions);
    }
    policies.emplace_back(std::move(table));
  }
  return PolicyClass(std::move(policies), num_actions);
}

ActionDistribution::ActionDistribution(std::vector<double> probs)
    : probs_(validated_simplex(std::move(probs), "ActionDistribution")) {}

double ActionDistribution::min_prob() const {
  return *std::min_element(probs_.begin(), probs_.end());
}

ActionDistribution validate_distribution(std::vector<double> probs) {
  return ActionDistribution(std::move(probs));
}

EstimatedCost EstimatedCost::spike(int action, double value) {
  if (action < 0) throw std::invalid_argument("EstimatedCost: negative spike action");
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("EstimatedCost: spike value must be positive and finite");
  }
  EstimatedCost c;
  c.action_ = action;
  c.value_ = value;
  return c;
}

HallucinationStep::HallucinationStep(Context c, int arm_index, int rademacher_sign, double z)
    : context(c), arm(arm_index), sign(rademacher_sign), scale(z) {
  if (arm < 0) throw std::invalid_argument("HallucinationStep: negative arm");
  if (sign != -1 && sign != 1) throw std::invalid_argument("HallucinationStep: sign must be +-1");
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("HallucinationStep: scale must be finite and nonnegative");
  }
}

}  // namespace relbandit
