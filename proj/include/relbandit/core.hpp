#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace relbandit {

// A runtime contract between modules was broken (e.g. exploration floor).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// A run or check was configured inconsistently.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Absolute tolerance for probability vectors summing to one.
inline constexpr double kProbSumTolerance = 1e-9;
// Absolute tolerance when checking the exploration floor gamma/K.
inline constexpr double kFloorTolerance = 1e-12;

// Index into a finite context universe of size X.
struct Context {
  int id = 0;
};

inline bool operator==(Context a, Context b) { return a.id == b.id; }

// Per-action losses, each in [0, 1].
class CostVector {
 public:
  explicit CostVector(std::vector<double> costs);

  int size() const { return static_cast<int>(costs_.size()); }
  double operator[](int i) const { return costs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return costs_; }

 private:
  std::vector<double> costs_;
};

// Lookup table mapping every context id to an action.
class Policy {
 public:
  explicit Policy(std::vector<int> table);

  int num_contexts() const { return static_cast<int>(table_.size()); }
  const std::vector<int>& table() const { return table_; }

 private:
  std::vector<int> table_;
};

// Action chosen by `policy` at `context`; throws on out-of-range contexts.
int policy_action(const Policy& policy, Context context);

// Finite benchmark class of policies over a shared (X, K) universe.
class PolicyClass {
 public:
  PolicyClass(std::vector<Policy> policies, int num_actions);

  // |size| uniform-random lookup tables. Generation is versioned: the same
  // seed yields the same class across releases.
  static PolicyClass random(int num_contexts, int num_actions, int size, std::uint64_t seed);

  int size() const { return static_cast<int>(policies_.size()); }
  int num_contexts() const { return num_contexts_; }
  int num_actions() const { return num_actions_; }
  const Policy& operator[](int i) const { return policies_[static_cast<std::size_t>(i)]; }
  const std::vector<Policy>& policies() const { return policies_; }

 private:
  std::vector<Policy> policies_;
  int num_contexts_ = 0;
  int num_actions_ = 0;
};

// Probability vector over actions. Construction validates nonnegativity and
// that the entries sum to 1 within kProbSumTolerance, then renormalizes the
// residual drift exactly once so the stored entries sum to exactly 1.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> probs);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }
  double min_prob() const;

 private:
  std::vector<double> probs_;
};

// Spec'd entry point for building a validated distribution from raw reals.
ActionDistribution validate_distribution(std::vector<double> probs);

// Sparse estimated cost vector: either all-zero or a single spike of height
// K/gamma at one action.
class EstimatedCost {
 public:
  EstimatedCost() = default;  // all-zero estimate
  static EstimatedCost zero() { return EstimatedCost(); }
  static EstimatedCost spike(int action, double value);

  bool is_spike() const { return action_ >= 0; }
  int spike_action() const { return action_; }
  double spike_value() const { return value_; }

  // Estimated cost of playing `action`.
  double at(int action) const { return action == action_ ? value_ : 0.0; }

  friend bool operator==(const EstimatedCost& a, const EstimatedCost& b) {
    return a.action_ == b.action_ && a.value_ == b.value_;
  }

 private:
  int action_ = -1;
  double value_ = 0.0;
};

// One hallucinated future round: a one-hot signed cost of magnitude `scale`
// (either 0 or K/gamma) at `arm`, shown at `context`.
struct HallucinationStep {
  Context context;
  int arm = 0;
  int sign = 1;     // -1 or +1
  double scale = 0.0;

  HallucinationStep(Context c, int arm_index, int rademacher_sign, double z);
};

// Hallucinated future tuple for rounds t+1..T (empty when t = T).
struct Rollout {
  std::vector<HallucinationStep> steps;

  int size() const { return static_cast<int>(steps.size()); }
  bool empty() const { return steps.empty(); }
};

// Variant used by the dense-hallucination baseline: an independent sign for
// every arm instead of a single random one.
struct DenseHallucinationStep {
  Context context;
  std::vector<std::int8_t> signs;  // length K, entries -1 or +1
  double scale = 0.0;
};

struct DenseRollout {
  std::vector<DenseHallucinationStep> steps;

  int size() const { return static_cast<int>(steps.size()); }
  bool empty() const { return steps.empty(); }
};

// One (context, estimated cost) pair of the interaction history.
struct HistoryEntry {
  Context context;
  EstimatedCost estimate;
};

inline bool operator==(const HistoryEntry& a, const HistoryEntry& b) {
  return a.context == b.context && a.estimate == b.estimate;
}

using History = std::vector<HistoryEntry>;

// Everything observed and produced in one round of an online learner.
struct RoundRecord {
  int t = 0;  // 1-based round index
  Context context;
  ActionDistribution q;
  int action = 0;
  double observed_cost = 0.0;
  EstimatedCost estimate;
  int oracle_calls = 0;
};

}  // namespace relbandit
