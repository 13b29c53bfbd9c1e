#pragma once

#include "relbandit/core.hpp"
#include "relbandit/rng.hpp"

namespace relbandit {

// Discretized unbiased estimate of the full cost vector from the single
// observed loss: a spike of height K/gamma at the chosen action with
// probability gamma * observed / (K * q(chosen)), otherwise all zeros.
//
// Requires min_i q(i) >= gamma/K (up to kFloorTolerance), which also
// guarantees the spike probability is at most 1. A floor violation is a
// broken contract, never silently clamped.
EstimatedCost estimate_cost(double observed, int chosen, const ActionDistribution& q,
                            double gamma, int num_actions, Rng& rng);

}  // namespace relbandit
