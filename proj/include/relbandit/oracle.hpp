#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "relbandit/core.hpp"

namespace relbandit {

// Extra spike of height K/gamma injected at the current context, used by the
// strategy to probe each action without materializing an estimate.
struct SpikeOverride {
  int action = 0;
  double value = 0.0;
};

// A mixed sequence of real past estimates and hallucinated future terms.
// At most one of `future` / `dense_future` may be nonempty, and `spike`
// requires `current_context`.
struct ErmQuery {
  std::span<const HistoryEntry> past{};
  std::optional<Context> current_context{};
  std::optional<SpikeOverride> spike{};
  std::span<const HallucinationStep> future{};
  std::span<const DenseHallucinationStep> dense_future{};
};

struct ErmAnswer {
  double value = 0.0;
  int argmin_policy = 0;
};

// Value-of-ERM oracle over a fixed policy class. Calls are counted so the
// per-round oracle budget can be audited. An instance is confined to one
// simulation run; distinct runs own distinct instances.
class ErmOracle {
 public:
  virtual ~ErmOracle() = default;

  ErmAnswer value_of_erm(const ErmQuery& query) {
    ++calls_;
    return compute(query);
  }

  std::int64_t call_count() const { return calls_; }

  virtual const PolicyClass& policy_class() const = 0;

 private:
  virtual ErmAnswer compute(const ErmQuery& query) = 0;

  std::int64_t calls_ = 0;
};

// Exhaustive enumeration over the policy class, with two caches that never
// change returned values versus from-scratch evaluation:
//   (a) per-policy prefix sums of past estimated cost, extended as the
//       history grows;
//   (b) per-policy hallucination sums for the last seen rollout, shared by
//       the K+1 strategy queries of a round.
class ExhaustiveErmOracle final : public ErmOracle {
 public:
  explicit ExhaustiveErmOracle(PolicyClass policies);

  const PolicyClass& policy_class() const override { return policies_; }

 private:
  ErmAnswer compute(const ErmQuery& query) override;

  std::span<const double> past_sums(std::span<const HistoryEntry> past);
  std::span<const double> future_sums(const ErmQuery& query);

  PolicyClass policies_;

  std::vector<HistoryEntry> cached_past_;
  std::vector<std::vector<double>> past_prefix_;  // past_prefix_[len][policy]

  std::vector<HallucinationStep> cached_future_;
  std::vector<double> future_sums_;
  std::vector<DenseHallucinationStep> cached_dense_future_;
  std::vector<double> dense_future_sums_;
};

std::unique_ptr<ErmOracle> make_exhaustive_oracle(PolicyClass policies);

// Exact minimum of the cumulative true cost over the class, with the argmin
// policy (lowest index on ties). This is the regret benchmark.
std::pair<double, int> best_fixed_policy_cost(const std::vector<Context>& contexts,
                                              const std::vector<CostVector>& true_costs,
                                              const PolicyClass& policies);

}  // namespace relbandit
