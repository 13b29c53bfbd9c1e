#include <doctest.h>

#include <vector>

#include "relbandit/oracle.hpp"
#include "relbandit/rng.hpp"

using namespace relbandit;

namespace {

// Independent evaluation of a single policy on a query, summing past entries
// in order, then the spike, then the future terms in order.
double eval_policy(const Policy& policy, const History& past,
                   const std::optional<Context>& x, const std::optional<SpikeOverride>& spike,
                   const std::vector<HallucinationStep>& future) {
  double value = 0.0;
  for (const HistoryEntry& e : past) value += e.estimate.at(policy_action(policy, e.context));
  if (spike.has_value() && policy_action(policy, *x) == spike->action) value += spike->value;
  double hallucinated = 0.0;
  for (const HallucinationStep& s : future) {
    if (policy_action(policy, s.context) == s.arm) {
      hallucinated += 2.0 * s.scale * static_cast<double>(s.sign);
    }
  }
  return value + hallucinated;
}

History random_history(int rounds, int num_contexts, int num_actions, double spike_value,
                       Rng& rng) {
  History h;
  for (int i = 0; i < rounds; ++i) {
    const Context x{rng.uniform_int(num_contexts)};
    if (rng.bernoulli(0.5)) {
      h.push_back({x, EstimatedCost::spike(rng.uniform_int(num_actions), spike_value)});
    } else {
      h.push_back({x, EstimatedCost::zero()});
    }
  }
  return h;
}

Rollout random_rollout(int steps, int num_contexts, int num_actions, double scale, double gamma,
                       Rng& rng) {
  Rollout r;
  for (int i = 0; i < steps; ++i) {
    r.steps.emplace_back(Context{rng.uniform_int(num_contexts)}, rng.uniform_int(num_actions),
                         rng.rademacher(), rng.bernoulli(gamma) ? scale : 0.0);
  }
  return r;
}

}  // namespace

TEST_CASE("value_of_erm on two-policy instances") {
  const PolicyClass pi({Policy({0, 0}), Policy({1, 1})}, 2);
  ExhaustiveErmOracle oracle(pi);

  SUBCASE("a spike in the past is dodged by the other policy") {
    History past = {{Context{0}, EstimatedCost::spike(0, 4.0)}, {Context{1}, EstimatedCost::zero()}};
    ErmQuery q;
    q.past = past;
    const ErmAnswer a = oracle.value_of_erm(q);
    CHECK(a.value == 0.0);
    CHECK(a.argmin_policy == 1);
  }

  SUBCASE("a negative hallucinated term attracts the minimizer") {
    Rollout future;
    future.steps.emplace_back(Context{1}, 1, -1, 4.0);
    ErmQuery q;
    q.future = future.steps;
    const ErmAnswer a = oracle.value_of_erm(q);
    CHECK(a.value == -8.0);
    CHECK(a.argmin_policy == 1);
  }
}

TEST_CASE("value_of_erm matches an independent per-policy summation") {
  const int num_contexts = 4, num_actions = 3;
  const double gamma = 0.5;
  const double spike = num_actions / gamma;
  const PolicyClass pi = PolicyClass::random(num_contexts, num_actions, 20, 99);
  ExhaustiveErmOracle oracle(pi);
  Rng rng(1234);

  for (int trial = 0; trial < 20; ++trial) {
    const History past = random_history(6, num_contexts, num_actions, spike, rng);
    const Rollout future = random_rollout(6, num_contexts, num_actions, spike, 0.6, rng);
    const Context x{ rng.uniform_int(num_contexts) };
    std::optional<SpikeOverride> over;
    if (rng.bernoulli(0.5)) over = SpikeOverride{rng.uniform_int(num_actions), spike};

    ErmQuery q;
    q.past = past;
    q.future = future.steps;
    q.current_context = x;
    q.spike = over;
    const ErmAnswer a = oracle.value_of_erm(q);

    double best = 0.0;
    int best_index = -1;
    for (int p = 0; p < pi.size(); ++p) {
      const double v = eval_policy(pi[p], past, x, over, future.steps);
      if (best_index < 0 || v < best) {
        best = v;
        best_index = p;
      }
    }
    CHECK(a.value == best);
    CHECK(a.argmin_policy == best_index);

    // The answer lower-bounds every sampled policy's own cost.
    for (int s = 0; s < 10; ++s) {
      const int p = rng.uniform_int(pi.size());
      CHECK(a.value <= eval_policy(pi[p], past, x, over, future.steps));
    }
  }
}

TEST_CASE("caching never changes values versus a fresh oracle") {
  const int num_contexts = 3, num_actions = 3;
  const double spike = 6.0;
  const PolicyClass pi = PolicyClass::random(num_contexts, num_actions, 12, 5);
  ExhaustiveErmOracle cached(pi);
  Rng rng(77);

  History history;
  for (int round = 0; round < 8; ++round) {
    const Rollout future = random_rollout(8 - round, num_contexts, num_actions, spike, 0.5, rng);
    const Context x{rng.uniform_int(num_contexts)};

    // K+1 probe queries against the same history/rollout, like one round.
    for (int i = -1; i < num_actions; ++i) {
      ErmQuery q;
      q.past = history;
      q.future = future.steps;
      q.current_context = x;
      if (i >= 0) q.spike = SpikeOverride{i, spike};
      ExhaustiveErmOracle fresh(pi);
      const ErmAnswer a = cached.value_of_erm(q);
      const ErmAnswer b = fresh.value_of_erm(q);
      CHECK(a.value == b.value);
      CHECK(a.argmin_policy == b.argmin_policy);
    }

    // Interleave a query one entry longer, then fall back (verifier pattern).
    History longer = history;
    longer.push_back({x, EstimatedCost::spike(rng.uniform_int(num_actions), spike)});
    ErmQuery q;
    q.past = longer;
    ExhaustiveErmOracle fresh(pi);
    CHECK(cached.value_of_erm(q).value == fresh.value_of_erm(q).value);

    history.push_back({x, rng.bernoulli(0.5)
                              ? EstimatedCost::spike(rng.uniform_int(num_actions), spike)
                              : EstimatedCost::zero()});
  }
}

TEST_CASE("appending one spike per action at a shared context shifts the value by the spike") {
  const int num_contexts = 3, num_actions = 3;
  const double spike = 6.0;  // K/gamma with gamma = 0.5, exactly representable
  const PolicyClass pi = PolicyClass::random(num_contexts, num_actions, 10, 3);
  ExhaustiveErmOracle oracle(pi);
  Rng rng(11);

  History base = random_history(5, num_contexts, num_actions, spike, rng);
  ErmQuery q;
  q.past = base;
  const ErmAnswer before = oracle.value_of_erm(q);

  // Every policy pays the spike exactly once, so the minimum shifts exactly.
  History shifted = base;
  const Context x{1};
  for (int a = 0; a < num_actions; ++a) shifted.push_back({x, EstimatedCost::spike(a, spike)});
  q.past = shifted;
  const ErmAnswer after = oracle.value_of_erm(q);
  CHECK(after.value == before.value + spike);
  CHECK(after.argmin_policy == before.argmin_policy);
}

TEST_CASE("value_of_erm ties break to the lowest policy index") {
  const PolicyClass pi({Policy({0}), Policy({0}), Policy({1})}, 2);
  ExhaustiveErmOracle oracle(pi);
  ErmQuery q;
  CHECK(oracle.value_of_erm(q).argmin_policy == 0);
}

TEST_CASE("value_of_erm validates query shape") {
  const PolicyClass pi({Policy({0, 1})}, 2);
  ExhaustiveErmOracle oracle(pi);
  ErmQuery q;
  q.spike = SpikeOverride{0, 4.0};  // spike without a current context
  CHECK_THROWS_AS(oracle.value_of_erm(q), std::invalid_argument);

  ErmQuery bad_ctx;
  History h = {{Context{5}, EstimatedCost::zero()}};
  bad_ctx.past = h;
  CHECK_THROWS_AS(oracle.value_of_erm(bad_ctx), std::out_of_range);
}

TEST_CASE("oracle call counter is cumulative") {
  const PolicyClass pi({Policy({0})}, 1);
  ExhaustiveErmOracle oracle(pi);
  CHECK(oracle.call_count() == 0);
  ErmQuery q;
  oracle.value_of_erm(q);
  oracle.value_of_erm(q);
  CHECK(oracle.call_count() == 2);
}

TEST_CASE("best_fixed_policy_cost enumerates exactly") {
  const PolicyClass pi({Policy({0, 0}), Policy({1, 1})}, 2);
  const std::vector<Context> contexts = {Context{0}, Context{1}};
  const std::vector<CostVector> costs = {CostVector({0.2, 0.7}), CostVector({0.5, 0.1})};
  const auto [value, index] = best_fixed_policy_cost(contexts, costs, pi);
  CHECK(value == doctest::Approx(0.7));
  CHECK(index == 0);

  const std::vector<CostVector> zeros = {CostVector({0.0, 0.0}), CostVector({0.0, 0.0})};
  const auto [zvalue, zindex] = best_fixed_policy_cost(contexts, zeros, pi);
  CHECK(zvalue == 0.0);
  CHECK(zindex == 0);

  CHECK_THROWS_AS(best_fixed_policy_cost({Context{0}}, costs, pi), std::invalid_argument);
}

TEST_CASE("best_fixed_policy_cost matches an exhaustive double loop") {
  const int num_contexts = 4, num_actions = 3, horizon = 100;
  const PolicyClass pi = PolicyClass::random(num_contexts, num_actions, 50, 21);
  Rng rng(2024);
  std::vector<Context> contexts;
  std::vector<CostVector> costs;
  for (int t = 0; t < horizon; ++t) {
    contexts.push_back(Context{rng.uniform_int(num_contexts)});
    std::vector<double> c(num_actions);
    for (double& v : c) v = rng.uniform01();
    costs.emplace_back(std::move(c));
  }
  const auto [value, index] = best_fixed_policy_cost(contexts, costs, pi);

  double best = 0.0;
  int best_index = -1;
  for (int p = 0; p < pi.size(); ++p) {
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) {
      total += costs[t][pi[p].table()[contexts[t].id]];
    }
    if (best_index < 0 || total < best) {
      best = total;
      best_index = p;
    }
  }
  CHECK(value == best);
  CHECK(index == best_index);
}
