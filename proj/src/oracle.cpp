#include "relbandit/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace relbandit {

namespace {

void check_context(Context c, int num_contexts, const char* where) {
  if (c.id < 0 || c.id >= num_contexts) {
    throw std::out_of_range(std::string(where) + ": context id " + std::to_string(c.id) +
                            " outside universe of size " + std::to_string(num_contexts));
  }
}

}  // namespace

ExhaustiveErmOracle::ExhaustiveErmOracle(PolicyClass policies) : policies_(std::move(policies)) {
  past_prefix_.push_back(std::vector<double>(static_cast<std::size_t>(policies_.size()), 0.0));
}

std::span<const double> ExhaustiveErmOracle::past_sums(std::span<const HistoryEntry> past) {
  const std::size_t n = past.size();
  // Longest prefix of the query shared with the cached history.
  std::size_t common = 0;
  const std::size_t limit = std::min(n, cached_past_.size());
  while (common < limit && past[common] == cached_past_[common]) ++common;

  if (common < cached_past_.size()) {
    cached_past_.resize(common);
    past_prefix_.resize(common + 1);
  }
  for (std::size_t i = common; i < n; ++i) {
    check_context(past[i].context, policies_.num_contexts(), "value_of_erm past");
    const HistoryEntry& entry = past[i];
    std::vector<double> row = past_prefix_.back();
    for (int p = 0; p < policies_.size(); ++p) {
      row[static_cast<std::size_t>(p)] += entry.estimate.at(policy_action(policies_[p], entry.context));
    }
    cached_past_.push_back(entry);
    past_prefix_.push_back(std::move(row));
  }
  return past_prefix_[n];
}

std::span<const double> ExhaustiveErmOracle::future_sums(const ErmQuery& query) {
  if (!query.future.empty()) {
    const bool hit = cached_future_.size() == query.future.size() &&
                     std::equal(cached_future_.begin(), cached_future_.end(), query.future.begin(),
                                [](const HallucinationStep& a, const HallucinationStep& b) {
                                  return a.context == b.context && a.arm == b.arm &&
                                         a.sign == b.sign && a.scale == b.scale;
                                });
    if (!hit) {
      cached_future_.assign(query.future.begin(), query.future.end());
      future_sums_.assign(static_cast<std::size_t>(policies_.size()), 0.0);
      for (const HallucinationStep& step : cached_future_) {
        check_context(step.context, policies_.num_contexts(), "value_of_erm future");
        for (int p = 0; p < policies_.size(); ++p) {
          if (policy_action(policies_[p], step.context) == step.arm) {
            future_sums_[static_cast<std::size_t>(p)] +=
                2.0 * step.scale * static_cast<double>(step.sign);
          }
        }
      }
    }
    return future_sums_;
  }
  const bool hit =
      cached_dense_future_.size() == query.dense_future.size() &&
      std::equal(cached_dense_future_.begin(), cached_dense_future_.end(),
                 query.dense_future.begin(),
                 [](const DenseHallucinationStep& a, const DenseHallucinationStep& b) {
                   return a.context == b.context && a.scale == b.scale && a.signs == b.signs;
                 });
  if (!hit) {
    cached_dense_future_.assign(query.dense_future.begin(), query.dense_future.end());
    dense_future_sums_.assign(static_cast<std::size_t>(policies_.size()), 0.0);
    for (const DenseHallucinationStep& step : cached_dense_future_) {
      check_context(step.context, policies_.num_contexts(), "value_of_erm future");
      if (static_cast<int>(step.signs.size()) != policies_.num_actions()) {
        throw std::invalid_argument("value_of_erm: dense hallucination sign count != K");
      }
      for (int p = 0; p < policies_.size(); ++p) {
        const int a = policy_action(policies_[p], step.context);
        dense_future_sums_[static_cast<std::size_t>(p)] +=
            2.0 * step.scale * static_cast<double>(step.signs[static_cast<std::size_t>(a)]);
      }
    }
  }
  return dense_future_sums_;
}

ErmAnswer ExhaustiveErmOracle::compute(const ErmQuery& query) {
  if (query.spike.has_value() && !query.current_context.has_value()) {
    throw std::invalid_argument("value_of_erm: spike override requires a current context");
  }
  if (!query.future.empty() && !query.dense_future.empty()) {
    throw std::invalid_argument("value_of_erm: both one-hot and dense futures given");
  }
  if (query.current_context.has_value()) {
    check_context(*query.current_context, policies_.num_contexts(), "value_of_erm");
  }

  const std::span<const double> base = past_sums(query.past);
  const bool has_future = !query.future.empty() || !query.dense_future.empty();
  const std::span<const double> hallu =
      has_future ? future_sums(query) : std::span<const double>{};

  ErmAnswer best{0.0, -1};
  for (int p = 0; p < policies_.size(); ++p) {
    double v = base[static_cast<std::size_t>(p)];
    if (query.spike.has_value() &&
        policy_action(policies_[p], *query.current_context) == query.spike->action) {
      v += query.spike->value;
    }
    if (has_future) v += hallu[static_cast<std::size_t>(p)];
    if (best.argmin_policy < 0 || v < best.value) {
      best.value = v;
      best.argmin_policy = p;
    }
  }
  return best;
}

std::unique_ptr<ErmOracle> make_exhaustive_oracle(PolicyClass policies) {
  return std::make_unique<ExhaustiveErmOracle>(std::move(policies));
}

std::pair<double, int> best_fixed_policy_cost(const std::vector<Context>& contexts,
                                              const std::vector<CostVector>& true_costs,
                                              const PolicyClass& policies) {
  if (contexts.size() != true_costs.size()) {
    throw std::invalid_argument("best_fixed_policy_cost: context/cost length mismatch");
  }
  for (const CostVector& c : true_costs) {
    if (c.size() != policies.num_actions()) {
      throw std::invalid_argument("best_fixed_policy_cost: cost vector length != K");
    }
  }
  double best = 0.0;
  int best_policy = -1;
  for (int p = 0; p < policies.size(); ++p) {
    double total = 0.0;
    for (std::size_t t = 0; t < contexts.size(); ++t) {
      total += true_costs[t][policy_action(policies[p], contexts[t])];
    }
    if (best_policy < 0 || total < best) {
      best = total;
      best_policy = p;
    }
  }
  return {best, best_policy};
}

}  // namespace relbandit
