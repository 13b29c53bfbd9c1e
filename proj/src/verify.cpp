#include "relbandit/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "relbandit/estimator.hpp"
#include "relbandit/learner.hpp"
#include "relbandit/parallel.hpp"
#include "relbandit/relaxation.hpp"
#include "relbandit/strategy.hpp"

namespace relbandit {

namespace {

constexpr double kExactSlack = 1e-9;

struct Accumulator {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Accumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double delta = o.mean - mean;
    const std::int64_t total = n + o.n;
    mean += delta * static_cast<double>(o.n) / static_cast<double>(total);
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(total);
    n = total;
  }

  MonteCarloStat stat() const {
    MonteCarloStat s;
    s.mean = mean;
    s.n = n;
    s.se = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return s;
  }
};

using BatchSampler = std::function<double(Rng&)>;
using BatchFactory = std::function<BatchSampler()>;

// Fixed batch layout independent of the job count, so serial and parallel
// execution pool to identical statistics.
MonteCarloStat pooled_mc(std::int64_t n_samples, Rng& rng, int jobs, const BatchFactory& factory) {
  if (n_samples < 1) throw std::invalid_argument("pooled_mc: need at least one sample");
  const int batches = static_cast<int>(std::min<std::int64_t>(n_samples, 32));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(batches));
  for (auto& s : seeds) s = rng.next_u64();
  std::vector<Accumulator> acc(static_cast<std::size_t>(batches));
  const std::int64_t base = n_samples / batches;
  const std::int64_t extra = n_samples % batches;

  parallel_for(batches, jobs, [&](int b) {
    BatchSampler sample = factory();
    Rng brng(seeds[static_cast<std::size_t>(b)]);
    const std::int64_t count = base + (b < extra ? 1 : 0);
    Accumulator a;
    for (std::int64_t i = 0; i < count; ++i) a.add(sample(brng));
    acc[static_cast<std::size_t>(b)] = a;
  });

  Accumulator total;
  for (const Accumulator& a : acc) total.merge(a);
  return total.stat();
}

ActionDistribution run_strategy(const StrategyFn& strategy, const History& history,
                                const Rollout& rollout, Context x, double gamma, int num_actions,
                                ErmOracle& oracle) {
  if (strategy) return strategy(history, rollout, x, gamma, num_actions, oracle);
  const PsiVector psi = compute_psi(history, rollout, x, gamma, num_actions, oracle);
  return mix_exploration(water_fill(eta_from_psi(psi, gamma, num_actions)), gamma, num_actions);
}

void check_tiny(const TinyInstance& inst) {
  if (inst.horizon < 1) throw std::invalid_argument("TinyInstance: horizon must be >= 1");
  if (!(inst.gamma > 0.0 && inst.gamma <= 1.0)) {
    throw std::invalid_argument("TinyInstance: gamma must be in (0,1]");
  }
  if (inst.contexts.num_contexts() != inst.policies.num_contexts()) {
    throw std::invalid_argument("TinyInstance: context distribution size != X");
  }
  if (inst.policies.num_actions() > 3 || inst.horizon > 4 || inst.policies.size() > 8 ||
      inst.policies.num_contexts() > 3) {
    throw ConfigError(
        "certification instance too large: need K <= 3, T <= 4, |Pi| <= 8, X <= 3");
  }
}

// History produced by running the shipped learner for `rounds` rounds against
// a seeded fixed cost sequence.
History generate_prefix(const TinyInstance& inst, int rounds) {
  History history;
  if (rounds == 0) return history;
  const int k = inst.policies.num_actions();
  Rng cost_rng(mix_seed(inst.seed, 0xC0575EC5ULL));
  std::vector<CostVector> costs;
  costs.reserve(static_cast<std::size_t>(rounds));
  for (int t = 0; t < rounds; ++t) {
    std::vector<double> c(static_cast<std::size_t>(k));
    for (double& v : c) v = cost_rng.uniform01();
    costs.emplace_back(std::move(c));
  }
  FixedSequenceAdversary adversary(std::move(costs));
  RunStreams streams(inst.seed, 0xAD7115ULL);
  RelaxBanditLearner learner(inst.policies, inst.contexts, inst.horizon, inst.gamma,
                             streams.rollout, streams.action, streams.estimator);
  for (int t = 1; t <= rounds; ++t) {
    const Context x = sample_context(inst.contexts, streams.context);
    const RoundRecord rec = learner.play_round(
        x, [&](const ActionDistribution& q) { return adversary.cost(t, x, q); });
    history.push_back({x, rec.estimate});
  }
  return history;
}

struct WeightedRollout {
  Rollout rollout;
  double prob = 1.0;
};

// All hallucination outcomes for rounds t+1..T with their probabilities,
// skipping zero-probability atoms.
std::vector<WeightedRollout> enumerate_rollouts(int t, int horizon, int num_actions, double gamma,
                                                const ContextDistribution& dist) {
  struct Atom {
    HallucinationStep step;
    double p;
  };
  const double spike = static_cast<double>(num_actions) / gamma;
  std::vector<Atom> atoms;
  for (int x = 0; x < dist.num_contexts(); ++x) {
    if (dist[x] == 0.0) continue;
    for (int arm = 0; arm < num_actions; ++arm) {
      for (int sign : {+1, -1}) {
        for (double z : {spike, 0.0}) {
          const double p = dist[x] / num_actions * 0.5 * (z > 0.0 ? gamma : 1.0 - gamma);
          if (p > 0.0) atoms.push_back({HallucinationStep(Context{x}, arm, sign, z), p});
        }
      }
    }
  }
  std::vector<WeightedRollout> out{WeightedRollout{}};
  for (int step = t + 1; step <= horizon; ++step) {
    std::vector<WeightedRollout> next;
    next.reserve(out.size() * atoms.size());
    for (const WeightedRollout& w : out) {
      for (const Atom& a : atoms) {
        WeightedRollout expanded = w;
        expanded.rollout.steps.push_back(a.step);
        expanded.prob *= a.p;
        next.push_back(std::move(expanded));
      }
    }
    out = std::move(next);
  }
  return out;
}

double rel_exact(const History& history, int t, int horizon, double gamma,
                 const std::vector<WeightedRollout>& rollouts, ErmOracle& oracle) {
  double value = 0.0;
  for (const WeightedRollout& w : rollouts) {
    value += w.prob * relaxation_random_value(history, w.rollout, t, horizon, gamma, oracle);
  }
  return value;
}

std::int64_t pow_int(std::int64_t base, int exp) {
  std::int64_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > (1LL << 40)) return v;  // saturate, only used for feasibility tests
    v *= base;
  }
  return v;
}

std::vector<CostVector> vertex_costs(int num_actions) {
  std::vector<CostVector> vertices;
  for (int mask = 0; mask < (1 << num_actions); ++mask) {
    std::vector<double> c(static_cast<std::size_t>(num_actions));
    for (int i = 0; i < num_actions; ++i) c[static_cast<std::size_t>(i)] = (mask >> i) & 1;
    vertices.emplace_back(std::move(c));
  }
  return vertices;
}

}  // namespace

MonteCarloStat estimate_rel(const History& history, int t, int horizon, double gamma,
                            int num_actions, const ContextDistribution& dist, ErmOracle& oracle,
                            std::int64_t n_samples, Rng& rng, int jobs) {
  if (n_samples < 1) throw std::invalid_argument("estimate_rel: n_samples must be >= 1");
  if (static_cast<int>(history.size()) != t) {
    throw std::invalid_argument("estimate_rel: history length != t");
  }
  if (t == horizon) {
    // No rollout left; the value is deterministic.
    Rollout empty;
    MonteCarloStat s;
    s.mean = relaxation_random_value(history, empty, t, horizon, gamma, oracle);
    s.se = 0.0;
    s.n = n_samples;
    return s;
  }
  const PolicyClass& policies = oracle.policy_class();
  return pooled_mc(n_samples, rng, jobs, [&]() -> BatchSampler {
    auto batch_oracle = std::make_shared<ExhaustiveErmOracle>(policies);
    return [&, batch_oracle](Rng& brng) {
      const Rollout rollout = sample_rollout(t, horizon, num_actions, gamma, dist, brng);
      return relaxation_random_value(history, rollout, t, horizon, gamma, *batch_oracle);
    };
  });
}

MonteCarloStat admissibility_inner_expectation(const History& history, int t,
                                               const TinyInstance& instance, Context x,
                                               const CostVector& c, ErmOracle& oracle,
                                               std::int64_t n_samples, Rng& rng, int jobs,
                                               const StrategyFn& strategy) {
  const int k = instance.policies.num_actions();
  const int horizon = instance.horizon;
  const double gamma = instance.gamma;
  if (static_cast<int>(history.size()) != t - 1) {
    throw std::invalid_argument("admissibility_inner_expectation: history length != t-1");
  }
  const PolicyClass& policies = oracle.policy_class();
  return pooled_mc(n_samples, rng, jobs, [&]() -> BatchSampler {
    auto batch_oracle = std::make_shared<ExhaustiveErmOracle>(policies);
    return [&, batch_oracle](Rng& brng) {
      const Rollout strategy_rollout =
          sample_rollout(t, horizon, k, gamma, instance.contexts, brng);
      const ActionDistribution q =
          run_strategy(strategy, history, strategy_rollout, x, gamma, k, *batch_oracle);
      const int chosen = brng.categorical(q.probs());
      const EstimatedCost estimate = estimate_cost(c[chosen], chosen, q, gamma, k, brng);
      History extended = history;
      extended.push_back({x, estimate});
      const Rollout rel_rollout = sample_rollout(t, horizon, k, gamma, instance.contexts, brng);
      return c[chosen] +
             relaxation_random_value(extended, rel_rollout, t, horizon, gamma, *batch_oracle);
    };
  });
}

CheckReport check_admissibility_step(const TinyInstance& instance, int t, std::int64_t n_outer,
                                     std::int64_t n_inner, Rng& rng, CheckMode mode, int jobs,
                                     const StrategyFn& strategy) {
  check_tiny(instance);
  const int horizon = instance.horizon;
  const int k = instance.policies.num_actions();
  const double gamma = instance.gamma;
  if (t < 1 || t > horizon) {
    throw std::invalid_argument("check_admissibility_step: t outside [1, T]");
  }

  const History history = generate_prefix(instance, t - 1);
  const std::vector<CostVector> vertices = vertex_costs(k);

  // Atom count of one hallucinated step decides whether exact enumeration of
  // both relaxation sides is feasible.
  std::int64_t step_atoms = 0;
  for (int x = 0; x < instance.contexts.num_contexts(); ++x) {
    if (instance.contexts[x] > 0.0) step_atoms += 2LL * k * (gamma < 1.0 ? 2 : 1);
  }
  const bool exact_feasible = pow_int(step_atoms, horizon - t + 1) <= 4096;
  const bool exact = mode == CheckMode::kExact ||
                     (mode == CheckMode::kAuto && exact_feasible);
  if (mode == CheckMode::kExact && !exact_feasible) {
    throw ConfigError("check_admissibility_step: outcome space too large for exact enumeration");
  }

  CheckReport report;
  report.name = "admissibility_step_t" + std::to_string(t);

  if (exact) {
    ExhaustiveErmOracle oracle(instance.policies);
    const auto rollouts_now = enumerate_rollouts(t, horizon, k, gamma, instance.contexts);
    const auto rollouts_prev = enumerate_rollouts(t - 1, horizon, k, gamma, instance.contexts);
    const double rhs = rel_exact(history, t - 1, horizon, gamma, rollouts_prev, oracle);

    const double spike_height = static_cast<double>(k) / gamma;
    double lhs = 0.0;
    for (int xi = 0; xi < instance.contexts.num_contexts(); ++xi) {
      const double px = instance.contexts[xi];
      if (px == 0.0) continue;
      const Context x{xi};

      // Terminal relaxation values for each possible estimate at (t, x).
      History extended = history;
      extended.push_back({x, EstimatedCost::zero()});
      const double rel_zero = rel_exact(extended, t, horizon, gamma, rollouts_now, oracle);
      std::vector<double> rel_spike(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        extended.back() = {x, EstimatedCost::spike(i, spike_height)};
        rel_spike[static_cast<std::size_t>(i)] =
            rel_exact(extended, t, horizon, gamma, rollouts_now, oracle);
      }

      std::vector<ActionDistribution> q_by_rollout;
      q_by_rollout.reserve(rollouts_now.size());
      for (const WeightedRollout& w : rollouts_now) {
        ActionDistribution q =
            run_strategy(strategy, history, w.rollout, x, gamma, k, oracle);
        if (q.min_prob() < gamma / k - kFloorTolerance) {
          throw ContractError("check_admissibility_step: strategy violates exploration floor");
        }
        q_by_rollout.push_back(std::move(q));
      }

      double best = 0.0;
      bool first = true;
      for (const CostVector& c : vertices) {
        double val = 0.0;
        for (std::size_t r = 0; r < rollouts_now.size(); ++r) {
          const ActionDistribution& q = q_by_rollout[r];
          double inner = 0.0;
          for (int y = 0; y < k; ++y) {
            const double fire = gamma * c[y] / (k * q[y]);
            inner += q[y] * (c[y] + fire * rel_spike[static_cast<std::size_t>(y)] +
                             (1.0 - fire) * rel_zero);
          }
          val += rollouts_now[r].prob * inner;
        }
        if (first || val > best) {
          best = val;
          first = false;
        }
      }
      lhs += px * best;
    }

    report.lhs = lhs;
    report.rhs = rhs;
    report.se = 0.0;
    report.n = static_cast<std::int64_t>(rollouts_now.size());
    report.pass = lhs <= rhs + kExactSlack;
    report.detail = "exact enumeration";
    return report;
  }

  ExhaustiveErmOracle oracle(instance.policies);
  const MonteCarloStat rhs = estimate_rel(history, t - 1, horizon, gamma, k, instance.contexts,
                                          oracle, n_outer, rng, jobs);
  double lhs = 0.0;
  double lhs_var = 0.0;
  for (int xi = 0; xi < instance.contexts.num_contexts(); ++xi) {
    const double px = instance.contexts[xi];
    if (px == 0.0) continue;
    MonteCarloStat best;
    bool first = true;
    for (const CostVector& c : vertices) {
      const MonteCarloStat stat = admissibility_inner_expectation(
          history, t, instance, Context{xi}, c, oracle, n_inner, rng, jobs, strategy);
      if (first || stat.mean > best.mean) {
        best = stat;
        first = false;
      }
    }
    lhs += px * best.mean;
    lhs_var += px * px * best.se * best.se;
  }
  report.lhs = lhs;
  report.rhs = rhs.mean;
  report.se = std::sqrt(lhs_var + rhs.se * rhs.se);
  report.n = n_inner;
  report.pass = lhs <= rhs.mean + 3.0 * report.se;
  report.detail = "monte carlo";
  return report;
}

CheckReport check_final_condition(const TinyInstance& instance, std::int64_t n_samples, Rng& rng,
                                  CheckMode mode, const std::vector<CostVector>* costs_override) {
  check_tiny(instance);
  const int horizon = instance.horizon;
  const int k = instance.policies.num_actions();
  const double gamma = instance.gamma;

  // Fixed context and cost sequences, plus the learner's realized
  // distributions for them.
  Rng ctx_rng(mix_seed(instance.seed, 0xF17A1C0ULL));
  Rng cost_rng(mix_seed(instance.seed, 0xF17A1C1ULL));
  std::vector<Context> contexts;
  std::vector<CostVector> costs;
  for (int t = 0; t < horizon; ++t) {
    contexts.push_back(sample_context(instance.contexts, ctx_rng));
    std::vector<double> c(static_cast<std::size_t>(k));
    for (double& v : c) v = cost_rng.uniform01();
    costs.emplace_back(std::move(c));
  }
  if (costs_override != nullptr) {
    if (static_cast<int>(costs_override->size()) != horizon) {
      throw std::invalid_argument("check_final_condition: costs override length != T");
    }
    costs = *costs_override;
  }

  RunStreams streams(instance.seed, 0xF17A1C2ULL);
  RelaxBanditLearner learner(instance.policies, instance.contexts, horizon, gamma,
                             streams.rollout, streams.action, streams.estimator);
  std::vector<ActionDistribution> q_seq;
  for (int t = 1; t <= horizon; ++t) {
    const RoundRecord rec = learner.play_round(contexts[static_cast<std::size_t>(t - 1)],
                                               [&](const ActionDistribution&) {
                                                 return costs[static_cast<std::size_t>(t - 1)];
                                               });
    q_seq.push_back(rec.q);
  }

  const double rhs = -best_fixed_policy_cost(contexts, costs, instance.policies).first;
  const std::int64_t atoms = pow_int(2LL * k, horizon);
  const bool exact =
      mode == CheckMode::kExact || (mode == CheckMode::kAuto && atoms <= 1000000);
  if (mode == CheckMode::kExact && atoms > 1000000) {
    throw ConfigError("check_final_condition: outcome space exceeds 10^6 atoms");
  }

  CheckReport report;
  report.name = "final_step_condition";
  report.rhs = rhs;

  if (exact) {
    ExhaustiveErmOracle oracle(instance.policies);
    double lhs = 0.0;
    History path;
    // Depth-first product over (action, coin) outcomes per round.
    std::function<void(int, double)> walk = [&](int t, double prob) {
      if (prob == 0.0) return;
      if (t > horizon) {
        ErmQuery query;
        query.past = path;
        lhs += prob * -oracle.value_of_erm(query).value;
        return;
      }
      const ActionDistribution& q = q_seq[static_cast<std::size_t>(t - 1)];
      const Context x = contexts[static_cast<std::size_t>(t - 1)];
      const CostVector& c = costs[static_cast<std::size_t>(t - 1)];
      for (int y = 0; y < k; ++y) {
        const double fire = gamma * c[y] / (k * q[y]);
        path.push_back({x, EstimatedCost::spike(y, static_cast<double>(k) / gamma)});
        walk(t + 1, prob * q[y] * fire);
        path.back() = {x, EstimatedCost::zero()};
        walk(t + 1, prob * q[y] * (1.0 - fire));
        path.pop_back();
      }
    };
    walk(1, 1.0);
    report.lhs = lhs;
    report.se = 0.0;
    report.n = atoms;
    report.pass = lhs >= rhs - kExactSlack;
    report.detail = "exact enumeration";
    return report;
  }

  const MonteCarloStat stat = pooled_mc(n_samples, rng, 1, [&]() -> BatchSampler {
    auto batch_oracle = std::make_shared<ExhaustiveErmOracle>(instance.policies);
    return [&, batch_oracle](Rng& brng) {
      History path;
      for (int t = 1; t <= horizon; ++t) {
        const ActionDistribution& q = q_seq[static_cast<std::size_t>(t - 1)];
        const int y = brng.categorical(q.probs());
        const EstimatedCost est = estimate_cost(costs[static_cast<std::size_t>(t - 1)][y], y, q,
                                                gamma, k, brng);
        path.push_back({contexts[static_cast<std::size_t>(t - 1)], est});
      }
      ErmQuery query;
      query.past = path;
      return -batch_oracle->value_of_erm(query).value;
    };
  });
  report.lhs = stat.mean;
  report.se = stat.se;
  report.n = stat.n;
  report.pass = stat.mean + 3.0 * stat.se >= rhs;
  report.detail = "monte carlo";
  return report;
}

CheckReport check_rademacher_bound(int horizon, int num_actions, const PolicyClass& policies,
                                   const ContextDistribution& dist, double gamma,
                                   std::int64_t n_samples, Rng& rng, int jobs) {
  const double log_pi = std::log(static_cast<double>(policies.size()));
  const double hypothesis = static_cast<double>(num_actions) * log_pi /
                            (2.0 * static_cast<double>(horizon));
  if (!(gamma > hypothesis)) {
    throw ConfigError("check_rademacher_bound: requires gamma > K*ln(|Pi|)/(2T) = " +
                      std::to_string(hypothesis) + ", got gamma = " + std::to_string(gamma));
  }
  if (!(gamma <= 1.0)) {
    throw ConfigError("check_rademacher_bound: gamma must be at most 1");
  }
  const double bound =
      2.0 * std::sqrt(static_cast<double>(num_actions) * horizon * log_pi / gamma);

  const MonteCarloStat stat = pooled_mc(n_samples, rng, jobs, [&]() -> BatchSampler {
    return [&](Rng& brng) {
      const Rollout draw = sample_rollout(0, horizon, num_actions, gamma, dist, brng);
      double sup = 0.0;
      bool first = true;
      for (int p = 0; p < policies.size(); ++p) {
        double sum = 0.0;
        for (const HallucinationStep& step : draw.steps) {
          if (policy_action(policies[p], step.context) == step.arm) {
            sum += step.scale * static_cast<double>(step.sign);
          }
        }
        if (first || sum > sup) {
          sup = sum;
          first = false;
        }
      }
      return sup;
    };
  });

  CheckReport report;
  report.name = "rademacher_bound_K" + std::to_string(num_actions) + "_T" +
                std::to_string(horizon) + "_g" + std::to_string(gamma);
  report.lhs = stat.mean;
  report.rhs = bound;
  report.se = stat.se;
  report.n = stat.n;
  report.pass = stat.mean - 3.0 * stat.se <= bound;
  return report;
}

std::vector<CheckReport> check_regret_bound(const PolicyClass& policies,
                                            const ContextDistribution& dist, int horizon,
                                            double gamma, int n_seeds, std::uint64_t master_seed,
                                            int jobs) {
  const int k = policies.num_actions();
  const double log_pi = std::log(static_cast<double>(policies.size()));
  const double lower = k * log_pi / (2.0 * static_cast<double>(horizon));
  if (!(gamma > lower && gamma <= 1.0)) {
    throw ConfigError("check_regret_bound: requires K*ln(|Pi|)/(2T) < gamma <= 1, i.e. gamma in (" +
                      std::to_string(lower) + ", 1], got gamma = " + std::to_string(gamma));
  }
  if (n_seeds < 1) throw std::invalid_argument("check_regret_bound: n_seeds must be >= 1");
  const double bound =
      4.0 * std::sqrt(static_cast<double>(horizon) * k * log_pi / gamma) + gamma * horizon;

  // Shared stochastic environment means, fixed across seeds.
  std::vector<std::vector<double>> means(static_cast<std::size_t>(dist.num_contexts()),
                                         std::vector<double>(static_cast<std::size_t>(k)));
  Rng mean_rng(mix_seed(master_seed, 0x57EA55ULL));
  for (auto& row : means) {
    for (double& m : row) m = mean_rng.uniform01();
  }

  const std::vector<std::string> kinds = {"constant", "stochastic", "punish_mode",
                                          "punish_above_uniform", "best_policy_chaser"};
  std::vector<CheckReport> reports;
  for (const std::string& kind : kinds) {
    std::vector<double> regrets(static_cast<std::size_t>(n_seeds), 0.0);
    parallel_for(n_seeds, jobs, [&](int s) {
      RunStreams streams(master_seed, static_cast<std::uint64_t>(s));
      std::unique_ptr<Adversary> adversary;
      if (kind == "constant") {
        adversary = std::make_unique<CustomRuleAdversary>(
            "constant", [k](int, Context, const ActionDistribution&) {
              return std::vector<double>(static_cast<std::size_t>(k), 0.5);
            });
      } else if (kind == "stochastic") {
        adversary = std::make_unique<StochasticAdversary>(
            means, StochasticAdversary::Noise::kBernoulli, streams.adversary);
      } else if (kind == "punish_mode") {
        adversary = std::make_unique<PunishModeAdversary>(k);
      } else if (kind == "punish_above_uniform") {
        adversary = std::make_unique<PunishAboveUniformAdversary>(k);
      } else {
        adversary = std::make_unique<BestPolicyChaserAdversary>(policies);
      }
      RelaxBanditLearner learner(policies, dist, horizon, gamma, streams.rollout, streams.action,
                                 streams.estimator);
      const EpisodeResult episode =
          run_episode(learner, *adversary, dist, policies, horizon, streams.context);
      regrets[static_cast<std::size_t>(s)] = episode.regret.expected_regret;
    });

    Accumulator acc;
    for (double r : regrets) acc.add(r);
    const MonteCarloStat stat = acc.stat();
    CheckReport report;
    report.name = "regret_bound_" + kind;
    report.lhs = stat.mean;
    report.rhs = bound;
    report.se = stat.se;
    report.n = stat.n;
    report.pass = stat.mean - 3.0 * stat.se <= bound;
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<int> count_oracle_calls(const std::vector<RoundRecord>& trace) {
  std::vector<int> counts;
  counts.reserve(trace.size());
  for (const RoundRecord& r : trace) counts.push_back(r.oracle_calls);
  return counts;
}

CheckReport check_oracle_budget_exact(const std::vector<RoundRecord>& trace, int expected) {
  CheckReport report;
  report.name = "oracle_budget_exact_" + std::to_string(expected);
  report.rhs = expected;
  report.n = static_cast<std::int64_t>(trace.size());
  report.pass = true;
  for (const RoundRecord& r : trace) {
    report.lhs = r.oracle_calls;
    if (r.oracle_calls != expected) {
      report.pass = false;
      report.detail = "round " + std::to_string(r.t) + " issued " +
                      std::to_string(r.oracle_calls) + " calls";
      return report;
    }
  }
  return report;
}

CheckReport check_oracle_budget_at_most(const std::vector<RoundRecord>& trace, int limit) {
  CheckReport report;
  report.name = "oracle_budget_at_most_" + std::to_string(limit);
  report.rhs = limit;
  report.n = static_cast<std::int64_t>(trace.size());
  report.pass = true;
  for (const RoundRecord& r : trace) {
    report.lhs = std::max(report.lhs, static_cast<double>(r.oracle_calls));
    if (r.oracle_calls > limit) {
      report.pass = false;
      report.detail = "round " + std::to_string(r.t) + " issued " +
                      std::to_string(r.oracle_calls) + " calls";
      return report;
    }
  }
  return report;
}

std::string render_report_json(const std::vector<CheckReport>& reports) {
  nlohmann::json out;
  out["schema_version"] = 1;
  bool all = true;
  out["checks"] = nlohmann::json::array();
  for (const CheckReport& r : reports) {
    all = all && r.pass;
    nlohmann::json c;
    c["name"] = r.name;
    c["lhs"] = r.lhs;
    c["rhs"] = r.rhs;
    c["se"] = r.se;
    c["n"] = r.n;
    c["pass"] = r.pass;
    if (!r.detail.empty()) c["detail"] = r.detail;
    out["checks"].push_back(std::move(c));
  }
  out["all_pass"] = all;
  return out.dump(2);
}

void validate_report_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("verification report is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("verification report: not an object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != 1) {
    throw std::invalid_argument("verification report: missing or unsupported schema_version");
  }
  if (!doc.contains("all_pass") || !doc["all_pass"].is_boolean()) {
    throw std::invalid_argument("verification report: missing all_pass flag");
  }
  if (!doc.contains("checks") || !doc["checks"].is_array()) {
    throw std::invalid_argument("verification report: missing checks array");
  }
  for (const auto& c : doc["checks"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string() || !c.contains("lhs") ||
        !c["lhs"].is_number() || !c.contains("rhs") || !c["rhs"].is_number() ||
        !c.contains("se") || !c["se"].is_number() || !c.contains("n") ||
        !c["n"].is_number_integer() || !c.contains("pass") || !c["pass"].is_boolean()) {
      throw std::invalid_argument("verification report: malformed check entry");
    }
  }
}

}  // namespace relbandit
