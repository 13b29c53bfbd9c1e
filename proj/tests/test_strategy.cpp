#include <doctest.h>

#include <cmath>

#include "grid_oracle.hpp"
#include "relbandit/rng.hpp"
#include "relbandit/strategy.hpp"

using namespace relbandit;

namespace {

double eval_query(const Policy& p, const History& past, Context x,
                  const std::optional<SpikeOverride>& spike, const Rollout& future) {
  double v = 0.0;
  for (const HistoryEntry& e : past) v += e.estimate.at(policy_action(p, e.context));
  if (spike.has_value() && policy_action(p, x) == spike->action) v += spike->value;
  double fut = 0.0;
  for (const HallucinationStep& s : future.steps) {
    if (policy_action(p, s.context) == s.arm) fut += 2.0 * s.scale * s.sign;
  }
  return v + fut;
}

}  // namespace

TEST_CASE("a class covering every action absorbs any spike") {
  const PolicyClass pi({Policy({0}), Policy({1}), Policy({2})}, 3);
  auto oracle = make_exhaustive_oracle(pi);
  const History empty;
  const PsiVector psi = compute_psi(empty, Rollout{}, Context{0}, 0.5, 3, *oracle);
  REQUIRE(psi.psi.size() == 4);
  for (double v : psi.psi) CHECK(v == 0.0);
}

TEST_CASE("a single constant policy is forced through its own spike") {
  const int a = 1;
  const PolicyClass pi({Policy({a})}, 3);
  auto oracle = make_exhaustive_oracle(pi);
  const History empty;
  const PsiVector psi = compute_psi(empty, Rollout{}, Context{0}, 0.5, 3, *oracle);
  CHECK(psi.psi[0] == 0.0);
  CHECK(psi.psi[a + 1] == 6.0);  // K/gamma
  CHECK(psi.psi[1] == 0.0);
  CHECK(psi.psi[3] == 0.0);
}

TEST_CASE("psi values match from-scratch enumeration") {
  const int num_contexts = 3, num_actions = 3;
  const double gamma = 0.4;
  const double spike = num_actions / gamma;
  const PolicyClass pi = PolicyClass::random(num_contexts, num_actions, 8, 17);
  auto oracle = make_exhaustive_oracle(pi);
  Rng rng(23);

  History history;
  Rollout rollout;
  for (int i = 0; i < 4; ++i) {
    history.push_back({Context{rng.uniform_int(num_contexts)},
                       rng.bernoulli(0.5)
                           ? EstimatedCost::spike(rng.uniform_int(num_actions), spike)
                           : EstimatedCost::zero()});
    rollout.steps.emplace_back(Context{rng.uniform_int(num_contexts)},
                               rng.uniform_int(num_actions), rng.rademacher(),
                               rng.bernoulli(gamma) ? spike : 0.0);
  }
  const Context x{2};
  const PsiVector psi = compute_psi(history, rollout, x, gamma, num_actions, *oracle);

  for (int i = 0; i <= num_actions; ++i) {
    std::optional<SpikeOverride> over;
    if (i > 0) over = SpikeOverride{i - 1, spike};
    double best = eval_query(pi[0], history, x, over, rollout);
    for (int p = 1; p < pi.size(); ++p) {
      best = std::min(best, eval_query(pi[p], history, x, over, rollout));
    }
    CHECK(psi.psi[static_cast<std::size_t>(i)] == best);
  }

  // A spike adds at most K/gamma to any policy's cost.
  for (int i = 1; i <= num_actions; ++i) {
    CHECK(psi.psi[static_cast<std::size_t>(i)] <= psi.psi[0] + spike + 1e-12);
  }
}

TEST_CASE("compute_psi issues exactly K+1 oracle calls") {
  const PolicyClass pi = PolicyClass::random(2, 3, 5, 3);
  auto oracle = make_exhaustive_oracle(pi);
  const History empty;
  const auto before = oracle->call_count();
  compute_psi(empty, Rollout{}, Context{0}, 0.5, 3, *oracle);
  CHECK(oracle->call_count() - before == 4);
}

TEST_CASE("eta is the scaled psi gap") {
  SUBCASE("full-height gap maps to a unit cap") {
    const PsiVector psi{{0.0, 4.0, 0.0}};  // K=2, gamma=0.5, K/gamma=4
    const auto eta = eta_from_psi(psi, 0.5, 2);
    CHECK(eta[0] == 1.0);
    CHECK(eta[1] == 0.0);
  }
  SUBCASE("constant psi maps to zero caps") {
    const PsiVector psi{{2.5, 2.5, 2.5, 2.5}};
    for (double v : eta_from_psi(psi, 0.7, 3)) CHECK(v == 0.0);
  }
  SUBCASE("direct arithmetic") {
    const PsiVector psi{{2.0, 3.5, 1.0, 4.0}};
    const auto eta = eta_from_psi(psi, 0.3, 3);
    CHECK(eta[0] == doctest::Approx(0.15));
    CHECK(eta[1] == doctest::Approx(-0.10));
    CHECK(eta[2] == doctest::Approx(0.20));
  }
}

TEST_CASE("water_fill handles the documented cases") {
  SUBCASE("no positive caps: uniform") {
    const ActionDistribution q = water_fill({-0.5, 0.0, -1.0});
    for (int i = 0; i < 3; ++i) CHECK(q[i] == doctest::Approx(1.0 / 3));
  }
  SUBCASE("partial allocation plus uniform remainder") {
    const ActionDistribution q = water_fill({0.3, 0.2, 0.1});
    CHECK(q[0] == doctest::Approx(0.3 + 0.4 / 3));
    CHECK(q[1] == doctest::Approx(0.2 + 0.4 / 3));
    CHECK(q[2] == doctest::Approx(0.1 + 0.4 / 3));
  }
  SUBCASE("caps that exhaust the budget") {
    const ActionDistribution q = water_fill({0.8, 0.5, 0.4});
    CHECK(q[0] == doctest::Approx(0.8));
    CHECK(q[1] == doctest::Approx(0.2));
    CHECK(q[2] == doctest::Approx(0.0));
    const double obj = testutil::relu_objective(q.probs(), {0.8, 0.5, 0.4});
    CHECK(obj == 0.0);
    CHECK(testutil::grid_objective_min({0.8, 0.5, 0.4}) >= obj);
  }
}

TEST_CASE("water_fill minimizes the hinge objective over the simplex") {
  Rng rng(2025);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + rng.uniform_int(4);
    std::vector<double> eta(static_cast<std::size_t>(k));
    double positive = 0.0;
    for (double& e : eta) {
      e = 2.0 * rng.uniform01() - 1.0;
      positive += std::max(e, 0.0);
    }
    const ActionDistribution q = water_fill(eta);
    const double obj = testutil::relu_objective(q.probs(), eta);
    CHECK(obj <= testutil::grid_objective_min(eta) + 1e-6);
    if (positive >= 1.0) CHECK(testutil::cap_excess(q.probs(), eta) == 0.0);
  }
}

TEST_CASE("water_fill depends on psi only through the gaps") {
  // Exactly representable values keep the gap arithmetic rounding-free.
  const PsiVector psi{{1.25, 3.5, 0.75, 2.0}};
  for (double shift : {0.5, 2.0, -4.0, 128.0}) {
    PsiVector shifted = psi;
    for (double& v : shifted.psi) v += shift;
    const ActionDistribution a = water_fill(eta_from_psi(psi, 0.5, 3));
    const ActionDistribution b = water_fill(eta_from_psi(shifted, 0.5, 3));
    for (int i = 0; i < 3; ++i) CHECK(a[i] == b[i]);
  }
}

TEST_CASE("mix_exploration enforces the floor") {
  SUBCASE("point mass") {
    const ActionDistribution q = mix_exploration(validate_distribution({1.0, 0.0}), 0.2, 2);
    CHECK(q[0] == doctest::Approx(0.9));
    CHECK(q[1] == doctest::Approx(0.1));
  }
  SUBCASE("gamma = 1 is uniform regardless of q*") {
    const ActionDistribution q = mix_exploration(validate_distribution({0.7, 0.2, 0.1}), 1.0, 3);
    for (int i = 0; i < 3; ++i) CHECK(q[i] == doctest::Approx(1.0 / 3));
  }
  SUBCASE("uniform is a fixed point") {
    const ActionDistribution q = mix_exploration(validate_distribution({0.5, 0.5}), 0.3, 2);
    CHECK(q[0] == doctest::Approx(0.5));
    CHECK(q[1] == doctest::Approx(0.5));
  }
  SUBCASE("random caps") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const int k = 2 + rng.uniform_int(3);
      std::vector<double> eta(static_cast<std::size_t>(k));
      for (double& e : eta) e = 2.0 * rng.uniform01() - 1.0;
      const double gamma = 0.05 + 0.9 * rng.uniform01();
      const ActionDistribution q = mix_exploration(water_fill(eta), gamma, k);
      CHECK(q.min_prob() >= gamma / k - 1e-12);
    }
  }
}

TEST_CASE("dense and one-hot futures agree when K = 1") {
  const PolicyClass pi({Policy({0, 0})}, 1);
  auto oracle = make_exhaustive_oracle(pi);
  Rollout one_hot;
  one_hot.steps.emplace_back(Context{1}, 0, -1, 2.0);
  DenseRollout dense;
  dense.steps.push_back({Context{1}, {-1}, 2.0});

  ErmQuery a;
  a.future = one_hot.steps;
  ErmQuery b;
  b.dense_future = dense.steps;
  CHECK(oracle->value_of_erm(a).value == oracle->value_of_erm(b).value);
}
