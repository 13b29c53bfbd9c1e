#include "relbandit/estimator.hpp"

#include <stdexcept>
#include <string>

namespace relbandit {

EstimatedCost estimate_cost(double observed, int chosen, const ActionDistribution& q,
                            double gamma, int num_actions, Rng& rng) {
  if (!(observed >= 0.0 && observed <= 1.0)) {
    throw std::invalid_argument("estimate_cost: observed loss outside [0,1]");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("estimate_cost: gamma must be in (0,1]");
  }
  if (q.size() != num_actions) {
    throw std::invalid_argument("estimate_cost: distribution size != K");
  }
  if (chosen < 0 || chosen >= num_actions) {
    throw std::invalid_argument("estimate_cost: chosen action out of range");
  }
  const double floor = gamma / static_cast<double>(num_actions);
  if (q.min_prob() < floor - kFloorTolerance) {
    throw ContractError("estimate_cost: exploration floor violated, min q = " +
                        std::to_string(q.min_prob()) + " < gamma/K = " + std::to_string(floor));
  }
  const double p = gamma * observed / (static_cast<double>(num_actions) * q[chosen]);
  // One coin per round keeps the estimator stream aligned across branches.
  const bool fire = rng.bernoulli(p);
  if (!fire) return EstimatedCost::zero();
  return EstimatedCost::spike(chosen, static_cast<double>(num_actions) / gamma);
}

}  // namespace relbandit
