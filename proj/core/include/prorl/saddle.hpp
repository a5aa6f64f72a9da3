#pragma once

#include <cstdint>

#include "prorl/classes.hpp"
#include "prorl/dataset.hpp"
#include "prorl/mdp.hpp"
#include "prorl/regularizer.hpp"

namespace prorl {

struct SaddleSolution {
    Matrix w_hat;
    Vector v_hat;
    std::size_t w_index = 0;
    std::size_t v_index = 0;
    double value = 0.0;  // L(v_hat, w_hat)
    double eps_ov = 0.0;
    double eps_ow = 0.0;
};

// payoffs(i, j) = L(v_j, w_i): one row per weight member, one column per value member.
Matrix empirical_payoffs(const EmpiricalModel& model, const ValueClass& values, const WeightClass& weights,
                         const Regularizer& reg, double alpha);
Matrix population_payoffs(const TabularMdp& mdp, const Occupancy& dD, const ValueClass& values,
                          const WeightClass& weights, const Regularizer& reg, double alpha);

// max over rows of the row minimum; ties go to the lowest index on both levels.
SaddleSolution solve_exact(const Matrix& payoffs, const ValueClass& values, const WeightClass& weights);
SaddleSolution solve_exact(const OfflineDataset& data, const ValueClass& values, const WeightClass& weights,
                           const Regularizer& reg, double alpha);

// Uniform choice among pairs within the slacks; zero slacks reduce to solve_exact.
SaddleSolution solve_inexact(const Matrix& payoffs, const ValueClass& values, const WeightClass& weights,
                             double eps_ov, double eps_ow, std::uint64_t seed);
SaddleSolution solve_inexact(const OfflineDataset& data, const ValueClass& values, const WeightClass& weights,
                             const Regularizer& reg, double alpha, double eps_ov, double eps_ow, std::uint64_t seed);

struct SaddleCheckReport {
    enum class Status { passed, failed, not_realizable };
    Status status = Status::not_realizable;
    double worst_violation = 0.0;  // max_w min_v L(v,w) - min_v L(v,w*), positive means failure
};

// Checks that (v*, w*) is a max-min point of the population Lagrangian restricted to the classes.
SaddleCheckReport population_saddle_check(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                          double alpha, const ValueClass& values, const WeightClass& weights,
                                          const Vector& v_star, const Matrix& w_star, double tol = 1e-10);

}  // namespace prorl
