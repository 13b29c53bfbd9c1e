#pragma once

#include "relbandit/core.hpp"
#include "relbandit/envs.hpp"
#include "relbandit/oracle.hpp"
#include "relbandit/rng.hpp"

namespace relbandit {

// Hallucinated future for rounds t+1..T. Per step, in draw order: a context
// from `dist`, a uniform arm, a Rademacher sign, and a scale that is K/gamma
// with probability gamma and 0 otherwise.
Rollout sample_rollout(int t, int horizon, int num_actions, double gamma,
                       const ContextDistribution& dist, Rng& rng);

// Dense-hallucination variant: one independent sign per arm, scale unchanged.
// Draw order per step: context, K signs in arm order, scale.
DenseRollout sample_dense_rollout(int t, int horizon, int num_actions, double gamma,
                                  const ContextDistribution& dist, Rng& rng);

// Random component of the relaxation for one sampled future:
//   gamma * (T - t) - value_of_erm(past = history, future = rollout).
// Makes exactly one oracle call. The relaxation itself is the expectation of
// this value over rollouts and is only ever estimated by averaging it.
double relaxation_random_value(const History& history, const Rollout& rollout, int t, int horizon,
                               double gamma, ErmOracle& oracle);

double relaxation_random_value(const History& history, const DenseRollout& rollout, int t,
                               int horizon, double gamma, ErmOracle& oracle);

}  // namespace relbandit
