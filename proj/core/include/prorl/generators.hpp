#pragma once

#include <cstdint>
#include <vector>

#include "prorl/mdp.hpp"

namespace prorl {

struct RandomMdpOptions {
    double zero_prob = 0.3;  // chance that a next-state entry is zeroed (one entry always survives)
};

TabularMdp random_mdp(int num_states, int num_actions, double gamma, std::uint64_t seed,
                      const RandomMdpOptions& options = {});

// Every transition row mixes a random row with mu0: P = (1 - mixing) Q + mixing mu0,
// so each policy's occupancy is bounded by a multiple of mu0.
TabularMdp ergodic_mdp(int num_states, int num_actions, double gamma, double mixing, std::uint64_t seed);

// Three states; state 0 has two actions of exactly equal optimal value, so the
// optimal occupancies form a segment.
TabularMdp tied_optimum_mdp(double gamma);

// Action 0 is optimal everywhere; action a >= 1 at state s has advantage gap
// gaps[s * (A - 1) + a - 1]. Transitions mix a sparse random row with mu0 as in
// ergodic_mdp, and rewards are set so that a random v is the optimal value.
TabularMdp graded_gap_mdp(int num_states, int num_actions, const std::vector<double>& gaps, double gamma,
                          double mixing, std::uint64_t seed);

Policy random_policy(int num_states, int num_actions, std::uint64_t seed, double floor = 0.0);
Vector random_distribution(int size, std::uint64_t seed, double floor = 0.0);

// dD(s,a) = d^{pi}(s,a): the data distribution of a behavior policy.
Occupancy behavior_occupancy(const TabularMdp& mdp, const Policy& behavior);

// pi_D(a|s) = dD(s,a) / dD(s), uniform where dD(s) = 0.
Policy behavior_policy(const Occupancy& dD);

}  // namespace prorl
