#pragma once

#include <utility>
#include <vector>

#include "prorl/classes.hpp"
#include "prorl/dataset.hpp"
#include "prorl/mdp.hpp"

namespace prorl {

struct ExtractionResult {
    Policy policy;
    std::vector<int> zero_mass_states;  // rows that fell back to uniform
};

// pi(a|s) proportional to w(s,a) pi_D(a|s); uniform where the normalizer is <= threshold.
ExtractionResult extract_policy(const Matrix& w, const Policy& behavior, double threshold = 1e-12);

struct CloneResult {
    Policy policy;
    std::size_t index = 0;
    double objective = 0.0;  // max_h sum_i w(s_i,a_i) (h^pi(s_i) - h(s_i,a_i)) at the chosen policy
};

// Exact min over the policy class of the max over witnesses; ties go to the lowest index.
CloneResult clone_policy(const Matrix& w_hat, const OfflineDataset& data, const PolicyClass& policies,
                         const std::vector<Matrix>& witnesses);
CloneResult clone_policy(const Matrix& w_hat, const OfflineDataset& data, const PolicyClass& policies);

// max_h sum_{s,a} weight(s,a) (h^pi(s) - h(s,a)) for an arbitrary nonnegative weight table.
double clone_objective(const Matrix& weighted_counts, const Policy& policy, const std::vector<Matrix>& witnesses);

// Prefix of n1 transitions (with the initial states) and the remaining suffix.
std::pair<OfflineDataset, OfflineDataset> split_dataset(const OfflineDataset& data, std::size_t n1);

}  // namespace prorl
