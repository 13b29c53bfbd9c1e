#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relbandit/core.hpp"
#include "relbandit/envs.hpp"
#include "relbandit/oracle.hpp"
#include "relbandit/rng.hpp"

namespace relbandit {

struct MonteCarloStat {
  double mean = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
};

// Outcome of one numerical certification. All checks are one-sided with an
// explicit 3-standard-error margin; exact enumerations report se = 0.
struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
  bool pass = false;
  std::string detail;
};

// Desk-scale instance the certification checks run on.
struct TinyInstance {
  PolicyClass policies;
  ContextDistribution contexts;
  int horizon = 0;
  double gamma = 0.0;
  std::uint64_t seed = 1;
};

enum class CheckMode { kAuto, kExact, kMonteCarlo };

// Monte-Carlo mean and standard error of the relaxation's random component
// over n_samples independent rollouts after t rounds (t = 0 gives the value
// before any interaction). Batches may run on `jobs` threads; the result is
// identical for any job count.
MonteCarloStat estimate_rel(const History& history, int t, int horizon, double gamma,
                            int num_actions, const ContextDistribution& dist, ErmOracle& oracle,
                            std::int64_t n_samples, Rng& rng, int jobs = 1);

// Strategy hook for the admissibility check. The default (empty) function is
// the shipped water-filling strategy; tests may inject broken ones.
using StrategyFn = std::function<ActionDistribution(const History&, const Rollout&, Context,
                                                    double gamma, int num_actions, ErmOracle&)>;

// One-sample-per-draw estimate of the per-step admissibility inner
// expectation at context x and cost vector c, on top of `history` (length t-1).
MonteCarloStat admissibility_inner_expectation(const History& history, int t,
                                               const TinyInstance& instance, Context x,
                                               const CostVector& c, ErmOracle& oracle,
                                               std::int64_t n_samples, Rng& rng, int jobs = 1,
                                               const StrategyFn& strategy = {});

// Certifies the per-step relaxation inequality at round t: the context
// expectation of the vertex-cost supremum of the inner expectation must not
// exceed the relaxation value after t-1 rounds. The sup over costs is taken
// over the 2^K vertex vectors only (the inner expectation is affine in c).
// Small instances are enumerated exactly; otherwise Monte-Carlo with a
// one-sided 3-sigma margin. Refuses instances too large to certify.
CheckReport check_admissibility_step(const TinyInstance& instance, int t, std::int64_t n_outer,
                                     std::int64_t n_inner, Rng& rng,
                                     CheckMode mode = CheckMode::kAuto, int jobs = 1,
                                     const StrategyFn& strategy = {});

// Certifies the final-step inequality: the expected terminal relaxation value
// is at least the negated benchmark cost, for a fixed context/cost sequence
// and the learner's realized per-round distributions. Exact enumeration when
// the joint outcome space has at most 10^6 atoms. `costs_override` pins the
// per-round cost vectors; by default they are drawn from the instance seed.
CheckReport check_final_condition(const TinyInstance& instance, std::int64_t n_samples, Rng& rng,
                                  CheckMode mode = CheckMode::kAuto,
                                  const std::vector<CostVector>* costs_override = nullptr);

// Certifies the hallucinated-sum bound: the Monte-Carlo mean of
// sup_pi sum_t Z_t eps_t(pi(x_t)) minus 3 SE stays below
// 2*sqrt(K*T*ln|Pi|/gamma). Requires gamma > K*ln|Pi|/(2T).
CheckReport check_rademacher_bound(int horizon, int num_actions, const PolicyClass& policies,
                                   const ContextDistribution& dist, double gamma,
                                   std::int64_t n_samples, Rng& rng, int jobs = 1);

// Runs the relaxation learner against each built-in adversary over n_seeds
// seeded episodes and compares mean expected regret against
// 4*sqrt(T*K*ln|Pi|/gamma) + gamma*T. One report per adversary.
std::vector<CheckReport> check_regret_bound(const PolicyClass& policies,
                                            const ContextDistribution& dist, int horizon,
                                            double gamma, int n_seeds, std::uint64_t master_seed,
                                            int jobs = 1);

// Per-round oracle-call counts of a trace.
std::vector<int> count_oracle_calls(const std::vector<RoundRecord>& trace);

// Every round must issue exactly `expected` calls; the report names the first
// violating round.
CheckReport check_oracle_budget_exact(const std::vector<RoundRecord>& trace, int expected);

// Every round must issue at most `limit` calls.
CheckReport check_oracle_budget_at_most(const std::vector<RoundRecord>& trace, int limit);

// JSON rendering of a verification report and its schema check.
std::string render_report_json(const std::vector<CheckReport>& reports);
void validate_report_json(const std::string& json_text);  // throws on schema violations

}  // namespace relbandit
