#include <doctest.h>

#include <cmath>

#include "relbandit/learner.hpp"
#include "relbandit/verify.hpp"

using namespace relbandit;

namespace {

TinyInstance make_tiny(int horizon, int policies, std::uint64_t seed = 11) {
  return TinyInstance{PolicyClass::random(2, 2, policies, seed),
                      ContextDistribution::uniform(2), horizon, 0.5, seed};
}

}  // namespace

TEST_CASE("estimate_rel at the final round is deterministic") {
  TinyInstance inst = make_tiny(2, 4);
  auto oracle = make_exhaustive_oracle(inst.policies);
  Rng rng(1);
  History history = {{Context{0}, EstimatedCost::zero()}, {Context{1}, EstimatedCost::zero()}};
  const MonteCarloStat stat =
      estimate_rel(history, 2, 2, 0.5, 2, inst.contexts, *oracle, 100, rng);
  CHECK(stat.mean == 0.0);
  CHECK(stat.se == 0.0);
}

TEST_CASE("estimate_rel matches exact enumeration of a one-step future") {
  const double gamma = 0.5;
  const PolicyClass pi = PolicyClass::random(2, 2, 4, 5);
  const ContextDistribution d = ContextDistribution::uniform(2);
  auto oracle = make_exhaustive_oracle(pi);
  Rng rng(3);
  const History empty;
  const MonteCarloStat stat = estimate_rel(empty, 0, 1, gamma, 2, d, *oracle, 40000, rng);

  // Exact expectation over the (x, arm, sign, z) atoms of the single step.
  double exact = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int arm = 0; arm < 2; ++arm) {
      for (int sign : {+1, -1}) {
        for (double z : {4.0, 0.0}) {
          const double p = 0.5 * 0.5 * 0.5 * (z > 0.0 ? gamma : 1.0 - gamma);
          double best = 0.0;
          bool first = true;
          for (int pol = 0; pol < pi.size(); ++pol) {
            const double v =
                policy_action(pi[pol], Context{x}) == arm ? 2.0 * z * sign : 0.0;
            if (first || v < best) {
              best = v;
              first = false;
            }
          }
          exact += p * (gamma * 1 - best);
        }
      }
    }
  }
  CHECK(std::abs(stat.mean - exact) < 3.0 * stat.se);
}

TEST_CASE("estimate_rel standard error scales as 1/sqrt(n)") {
  TinyInstance inst = make_tiny(3, 4);
  auto oracle = make_exhaustive_oracle(inst.policies);
  Rng rng(9);
  const History empty;
  const MonteCarloStat small =
      estimate_rel(empty, 0, 3, inst.gamma, 2, inst.contexts, *oracle, 20000, rng);
  const MonteCarloStat large =
      estimate_rel(empty, 0, 3, inst.gamma, 2, inst.contexts, *oracle, 80000, rng);
  const double ratio = (small.se * small.se) / (large.se * large.se);
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.5);
}

TEST_CASE("estimate_rel pools identically across job counts") {
  TinyInstance inst = make_tiny(3, 4);
  auto oracle = make_exhaustive_oracle(inst.policies);
  const History empty;
  Rng rng1(9), rng2(9);
  const MonteCarloStat serial =
      estimate_rel(empty, 0, 3, inst.gamma, 2, inst.contexts, *oracle, 5000, rng1, 1);
  const MonteCarloStat parallel =
      estimate_rel(empty, 0, 3, inst.gamma, 2, inst.contexts, *oracle, 5000, rng2, 4);
  CHECK(serial.mean == parallel.mean);
  CHECK(serial.se == parallel.se);
}

TEST_CASE("admissibility at the final round of a one-policy class is exact") {
  TinyInstance inst = make_tiny(2, 1);
  Rng rng(2);
  const CheckReport report =
      check_admissibility_step(inst, inst.horizon, 1, 1, rng, CheckMode::kExact);
  CHECK(report.se == 0.0);
  CHECK(report.pass);
  CHECK(report.lhs <= report.rhs + 1e-9);
}

TEST_CASE("admissibility holds at every round of a tiny instance") {
  TinyInstance inst = make_tiny(2, 2);
  Rng rng(7);
  for (int t = 1; t <= inst.horizon; ++t) {
    const CheckReport report =
        check_admissibility_step(inst, t, 20000, 20000, rng, CheckMode::kMonteCarlo);
    CHECK(report.pass);
  }
}

TEST_CASE("exact and monte-carlo admissibility paths agree") {
  TinyInstance inst = make_tiny(2, 4);
  Rng rng(13);
  const CheckReport exact = check_admissibility_step(inst, 1, 1, 1, rng, CheckMode::kExact);
  const CheckReport mc =
      check_admissibility_step(inst, 1, 40000, 40000, rng, CheckMode::kMonteCarlo);
  CHECK(exact.pass);
  CHECK(mc.pass);
  CHECK(std::abs(exact.rhs - mc.rhs) < 4.0 * mc.se + 1e-9);
  CHECK(std::abs(exact.lhs - mc.lhs) < 4.0 * mc.se + 1e-9);
}

TEST_CASE("a floor-violating strategy is rejected before evaluation") {
  TinyInstance inst = make_tiny(2, 2);
  Rng rng(5);
  const StrategyFn broken = [](const History&, const Rollout&, Context, double, int num_actions,
                               ErmOracle&) {
    std::vector<double> q(static_cast<std::size_t>(num_actions), 0.0);
    q[0] = 1.0;
    return ActionDistribution(q);
  };
  CHECK_THROWS_AS(
      check_admissibility_step(inst, 1, 100, 100, rng, CheckMode::kMonteCarlo, 1, broken),
      ContractError);
  CHECK_THROWS_AS(check_admissibility_step(inst, 1, 1, 1, rng, CheckMode::kExact, 1, broken),
                  ContractError);
}

TEST_CASE("oversized instances are refused") {
  TinyInstance inst{PolicyClass::random(2, 2, 4, 1), ContextDistribution::uniform(2), 9, 0.5, 1};
  Rng rng(1);
  CHECK_THROWS_AS(check_admissibility_step(inst, 1, 10, 10, rng), ConfigError);
  CHECK_THROWS_AS(check_final_condition(inst, 10, rng), ConfigError);
}

TEST_CASE("the inner admissibility expectation is affine in the cost vector") {
  TinyInstance inst = make_tiny(2, 4);
  auto oracle = make_exhaustive_oracle(inst.policies);
  Rng rng(17);
  const History empty;
  const int n = 20000;

  const CostVector c0({0.9, 0.1});
  const CostVector c1({0.2, 0.7});
  const double alpha = 0.3;
  std::vector<double> mixed(2);
  for (int i = 0; i < 2; ++i) mixed[i] = alpha * c0[i] + (1.0 - alpha) * c1[i];

  const MonteCarloStat at_c0 =
      admissibility_inner_expectation(empty, 1, inst, Context{0}, c0, *oracle, n, rng);
  const MonteCarloStat at_c1 =
      admissibility_inner_expectation(empty, 1, inst, Context{0}, c1, *oracle, n, rng);
  const MonteCarloStat at_mix = admissibility_inner_expectation(empty, 1, inst, Context{0},
                                                                CostVector(mixed), *oracle, n,
                                                                rng);
  const double interpolated = alpha * at_c0.mean + (1.0 - alpha) * at_c1.mean;
  const double se = std::sqrt(at_mix.se * at_mix.se + alpha * alpha * at_c0.se * at_c0.se +
                              (1.0 - alpha) * (1.0 - alpha) * at_c1.se * at_c1.se);
  CHECK(std::abs(at_mix.mean - interpolated) < 3.0 * se);
}

TEST_CASE("final-step condition with zero costs is an exact equality") {
  TinyInstance inst = make_tiny(3, 4);
  Rng rng(19);
  const std::vector<CostVector> zeros(3, CostVector({0.0, 0.0}));
  const CheckReport report =
      check_final_condition(inst, 1000, rng, CheckMode::kExact, &zeros);
  CHECK(report.pass);
  CHECK(report.lhs == 0.0);
  CHECK(report.rhs == 0.0);
  CHECK(report.se == 0.0);
}

TEST_CASE("final-step condition holds exactly on a one-policy class") {
  TinyInstance inst = make_tiny(3, 1);
  Rng rng(23);
  const CheckReport report = check_final_condition(inst, 1000, rng, CheckMode::kExact);
  CHECK(report.pass);
  CHECK(report.se == 0.0);
}

TEST_CASE("final-step condition holds on random tiny instances, both paths") {
  TinyInstance inst = make_tiny(3, 4, 29);
  Rng rng(29);
  const CheckReport exact = check_final_condition(inst, 1, rng, CheckMode::kExact);
  CHECK(exact.pass);
  const CheckReport mc = check_final_condition(inst, 10000, rng, CheckMode::kMonteCarlo);
  CHECK(mc.pass);
  CHECK(std::abs(exact.lhs - mc.lhs) < 4.0 * mc.se + 1e-9);
}

TEST_CASE("hallucinated-sum bound holds at gamma = 1 and for single-policy classes") {
  Rng rng(31);
  const PolicyClass pi = PolicyClass::random(2, 2, 4, 31);
  const ContextDistribution d = ContextDistribution::uniform(2);

  const CheckReport at_one = check_rademacher_bound(64, 2, pi, d, 1.0, 10000, rng);
  CHECK(at_one.pass);

  const PolicyClass single({Policy({0, 1})}, 2);
  const CheckReport no_sup = check_rademacher_bound(64, 2, single, d, 0.5, 10000, rng);
  CHECK(no_sup.pass);
  CHECK(std::abs(no_sup.lhs) < 3.0 * no_sup.se);
}

TEST_CASE("hallucinated-sum bound rejects gammas below its hypothesis") {
  Rng rng(37);
  const PolicyClass pi = PolicyClass::random(2, 2, 8, 37);
  const ContextDistribution d = ContextDistribution::uniform(2);
  // K ln|Pi| / (2T) = 2 ln 8 / 128, about 0.0325.
  CHECK_THROWS_WITH_AS(check_rademacher_bound(64, 2, pi, d, 0.01, 100, rng),
                       doctest::Contains("gamma > K*ln(|Pi|)/(2T)"), ConfigError);
}

TEST_CASE("regret bound holds on a small instance for every built-in adversary") {
  const PolicyClass pi = PolicyClass::random(2, 2, 4, 41);
  const ContextDistribution d = ContextDistribution::uniform(2);
  const double gamma = default_gamma(256, 2, 4);
  const auto reports = check_regret_bound(pi, d, 256, gamma, 10, 7, 1);
  REQUIRE(reports.size() == 5);
  for (const CheckReport& r : reports) CHECK(r.pass);
}

TEST_CASE("regret bound at gamma = 1 is vacuous but still checked") {
  const PolicyClass pi = PolicyClass::random(2, 2, 4, 43);
  const ContextDistribution d = ContextDistribution::uniform(2);
  const auto reports = check_regret_bound(pi, d, 64, 1.0, 3, 7, 1);
  for (const CheckReport& r : reports) {
    CHECK(r.rhs >= 64.0);
    CHECK(r.pass);
  }
}

TEST_CASE("regret bound rejects out-of-range gammas") {
  const PolicyClass pi = PolicyClass::random(2, 2, 4, 47);
  const ContextDistribution d = ContextDistribution::uniform(2);
  CHECK_THROWS_AS(check_regret_bound(pi, d, 1000, 0.0001, 2, 7, 1), ConfigError);
  CHECK_THROWS_AS(check_regret_bound(pi, d, 1000, 1.5, 2, 7, 1), ConfigError);
}

TEST_CASE("a K=3 relaxation run issues four oracle calls every round") {
  const PolicyClass pi = PolicyClass::random(2, 3, 5, 51);
  const ContextDistribution d = ContextDistribution::uniform(2);
  RunStreams streams(3, 3);
  RelaxBanditLearner learner(pi, d, 10, 0.5, streams.rollout, streams.action, streams.estimator);
  PunishModeAdversary adversary(3);
  const EpisodeResult episode = run_episode(learner, adversary, d, pi, 10, streams.context);
  const std::vector<int> counts = count_oracle_calls(episode.records);
  REQUIRE(counts.size() == 10);
  for (int c : counts) CHECK(c == 4);
  CHECK(check_oracle_budget_exact(episode.records, 4).pass);
}

TEST_CASE("oracle budget checks report the first violating round") {
  std::vector<RoundRecord> trace;
  const ActionDistribution q = validate_distribution({0.5, 0.5});
  for (int t = 1; t <= 4; ++t) {
    trace.push_back(RoundRecord{t, Context{0}, q, 0, 0.1, EstimatedCost::zero(), 3});
  }
  CHECK(count_oracle_calls(trace) == std::vector<int>{3, 3, 3, 3});
  CHECK(check_oracle_budget_exact(trace, 3).pass);
  CHECK_FALSE(check_oracle_budget_exact(trace, 4).pass);
  CHECK(check_oracle_budget_at_most(trace, 3).pass);

  trace[2].oracle_calls = 5;
  const CheckReport broken = check_oracle_budget_exact(trace, 3);
  CHECK_FALSE(broken.pass);
  CHECK(broken.detail.find("round 3") != std::string::npos);
}

TEST_CASE("verification reports render valid JSON and survive schema validation") {
  std::vector<CheckReport> reports;
  reports.push_back(CheckReport{"alpha", 1.0, 2.0, 0.1, 100, true, ""});
  reports.push_back(CheckReport{"beta", 3.0, 2.5, 0.0, 7, false, "round 3 issued 5 calls"});
  const std::string text = render_report_json(reports);
  CHECK_NOTHROW(validate_report_json(text));
  CHECK(text.find("\"all_pass\": false") != std::string::npos);

  CHECK_THROWS_AS(validate_report_json("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(validate_report_json("{\"schema_version\": 2, \"all_pass\": true, \"checks\": []}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_report_json("{\"schema_version\": 1, \"checks\": []}"),
                  std::invalid_argument);
}
