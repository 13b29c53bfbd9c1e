#include "relbandit/envs.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relbandit {

ContextDistribution::ContextDistribution(std::vector<double> probs) {
  // Same simplex contract as ActionDistribution, reusing its validation.
  probs_ = ActionDistribution(std::move(probs)).probs();
}

ContextDistribution ContextDistribution::uniform(int num_contexts) {
  if (num_contexts < 1) throw std::invalid_argument("ContextDistribution: empty universe");
  return ContextDistribution(
      std::vector<double>(static_cast<std::size_t>(num_contexts), 1.0 / num_contexts));
}

Context sample_context(const ContextDistribution& dist, Rng& rng) {
  return Context{rng.categorical(dist.probs())};
}

FixedSequenceAdversary::FixedSequenceAdversary(std::vector<CostVector> costs)
    : costs_(std::move(costs)) {
  if (costs_.empty()) throw std::invalid_argument("FixedSequenceAdversary: empty sequence");
}

CostVector FixedSequenceAdversary::cost(int t, Context, const ActionDistribution&) {
  if (t < 1 || t > static_cast<int>(costs_.size())) {
    throw std::invalid_argument("FixedSequenceAdversary: round " + std::to_string(t) +
                                " outside stored horizon " + std::to_string(costs_.size()));
  }
  return costs_[static_cast<std::size_t>(t - 1)];
}

StochasticAdversary::StochasticAdversary(std::vector<std::vector<double>> means_by_context,
                                         Noise noise, Rng& rng)
    : means_(std::move(means_by_context)), noise_(noise), rng_(rng) {
  if (means_.empty()) throw std::invalid_argument("StochasticAdversary: no contexts");
  const std::size_t k = means_.front().size();
  for (const auto& row : means_) {
    if (row.size() != k || k == 0) {
      throw std::invalid_argument("StochasticAdversary: ragged mean matrix");
    }
    for (double m : row) {
      if (!(m >= 0.0 && m <= 1.0)) {
        throw std::invalid_argument("StochasticAdversary: mean outside [0,1]");
      }
    }
  }
}

CostVector StochasticAdversary::cost(int, Context x, const ActionDistribution&) {
  if (x.id < 0 || x.id >= static_cast<int>(means_.size())) {
    throw std::out_of_range("StochasticAdversary: context outside mean matrix");
  }
  const auto& row = means_[static_cast<std::size_t>(x.id)];
  std::vector<double> c(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    c[i] = noise_ == Noise::kBernoulli ? (rng_.bernoulli(row[i]) ? 1.0 : 0.0) : row[i];
  }
  return CostVector(std::move(c));
}

CostVector PunishModeAdversary::cost(int, Context, const ActionDistribution& q) {
  if (q.size() != num_actions_) throw std::invalid_argument("PunishModeAdversary: q size != K");
  int mode = 0;
  for (int i = 1; i < q.size(); ++i) {
    if (q[i] > q[mode]) mode = i;
  }
  std::vector<double> c(static_cast<std::size_t>(num_actions_), 0.0);
  c[static_cast<std::size_t>(mode)] = 1.0;
  return CostVector(std::move(c));
}

CostVector PunishAboveUniformAdversary::cost(int, Context, const ActionDistribution& q) {
  if (q.size() != num_actions_) {
    throw std::invalid_argument("PunishAboveUniformAdversary: q size != K");
  }
  const double uniform = 1.0 / static_cast<double>(num_actions_);
  std::vector<double> c(static_cast<std::size_t>(num_actions_), 0.0);
  for (int i = 0; i < num_actions_; ++i) {
    if (q[i] > uniform) c[static_cast<std::size_t>(i)] = 1.0;
  }
  return CostVector(std::move(c));
}

BestPolicyChaserAdversary::BestPolicyChaserAdversary(PolicyClass policies)
    : policies_(std::move(policies)),
      cumulative_(static_cast<std::size_t>(policies_.size()), 0.0) {}

CostVector BestPolicyChaserAdversary::cost(int, Context x, const ActionDistribution&) {
  int best = 0;
  for (int p = 1; p < policies_.size(); ++p) {
    if (cumulative_[static_cast<std::size_t>(p)] < cumulative_[static_cast<std::size_t>(best)]) {
      best = p;
    }
  }
  std::vector<double> c(static_cast<std::size_t>(policies_.num_actions()), 1.0);
  c[static_cast<std::size_t>(policy_action(policies_[best], x))] = 0.0;
  CostVector cost(std::move(c));
  for (int p = 0; p < policies_.size(); ++p) {
    cumulative_[static_cast<std::size_t>(p)] += cost[policy_action(policies_[p], x)];
  }
  return cost;
}

CostVector CustomRuleAdversary::cost(int t, Context x, const ActionDistribution& q) {
  std::vector<double> raw = rule_(t, x, q);
  try {
    return CostVector(std::move(raw));
  } catch (const std::invalid_argument& e) {
    throw ContractError("adversary '" + name_ + "' emitted an invalid cost vector: " + e.what());
  }
}

std::vector<CostVector> load_cost_csv(const std::string& path, int num_actions) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_cost_csv: cannot open " + path);
  std::vector<CostVector> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("load_cost_csv: bad number at " + path + ":" +
                                    std::to_string(line_no));
      }
    }
    if (static_cast<int>(values.size()) != num_actions) {
      throw std::invalid_argument("load_cost_csv: expected " + std::to_string(num_actions) +
                                  " columns at " + path + ":" + std::to_string(line_no));
    }
    rows.emplace_back(std::move(values));
  }
  if (rows.empty()) throw std::invalid_argument("load_cost_csv: no rows in " + path);
  return rows;
}

}  // namespace relbandit
