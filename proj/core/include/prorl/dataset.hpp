#pragma once

#include <cstdint>
#include <vector>

#include "prorl/mdp.hpp"

namespace prorl {

struct Transition {
    int s;
    int a;
    double r;
    int sp;
};

/// I.i.d. transitions from d^D plus initial-state draws from mu0.
struct OfflineDataset {
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    std::vector<Transition> transitions;
    std::vector<int> init_states;
    Occupancy generating_dD;
    std::uint64_t seed = 0;

    std::size_t n() const { return transitions.size(); }
    std::size_t n0() const { return init_states.size(); }
};

// Cells are drawn by inverse CDF over the row-major flattening of dD, then
// s' from P(.|s,a); the n0 initial states are drawn afterwards from mu0.
OfflineDataset generate_dataset(const TabularMdp& mdp, const Occupancy& dD, std::size_t n, std::size_t n0,
                                std::uint64_t seed);

// Index of the first cumulative weight exceeding u * total, skipping zero-weight entries.
int sample_categorical(const double* weights, int count, double u);

/// Sufficient statistics of a dataset: cell frequencies, mean rewards,
/// empirical next-state distributions and the empirical initial distribution.
struct EmpiricalModel {
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    Matrix cell_freq;    // S x A, count / n
    Matrix mean_reward;  // S x A, 0 where unobserved
    Matrix next_state;   // (S*A) x S, conditional frequencies, 0 rows where unobserved
    Vector init_freq;    // S

    explicit EmpiricalModel(const OfflineDataset& data);
};

}  // namespace prorl
