#include "prorl/saddle.hpp"

#include <algorithm>
#include <limits>

#include "prorl/error.hpp"
#include "prorl/objective.hpp"
#include "prorl/rng.hpp"

namespace prorl {

namespace {

void check_classes(const ValueClass& values, const WeightClass& weights) {
    if (values.members.empty() || weights.members.empty()) throw InvalidArgument("saddle solver: empty class");
}

template <class Eval>
Matrix payoff_table(const ValueClass& values, const WeightClass& weights, Eval&& eval) {
    check_classes(values, weights);
    Matrix out(static_cast<Eigen::Index>(weights.members.size()), static_cast<Eigen::Index>(values.members.size()));
    for (std::size_t i = 0; i < weights.members.size(); ++i)
        for (std::size_t j = 0; j < values.members.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval(values.members[j], weights.members[i]);
    return out;
}

// First index attaining the row minimum.
Eigen::Index row_argmin(const Matrix& payoffs, Eigen::Index i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < payoffs.cols(); ++j)
        if (payoffs(i, j) < payoffs(i, best)) best = j;
    return best;
}

SaddleSolution make_solution(const Matrix& payoffs, const ValueClass& values, const WeightClass& weights,
                             Eigen::Index i, Eigen::Index j, double row_min, double max_min) {
    SaddleSolution out;
    out.w_index = static_cast<std::size_t>(i);
    out.v_index = static_cast<std::size_t>(j);
    out.w_hat = weights.members[out.w_index];
    out.v_hat = values.members[out.v_index];
    out.value = payoffs(i, j);
    out.eps_ov = payoffs(i, j) - row_min;
    out.eps_ow = max_min - row_min;
    return out;
}

}  // namespace

Matrix empirical_payoffs(const EmpiricalModel& model, const ValueClass& values, const WeightClass& weights,
                         const Regularizer& reg, double alpha) {
    return payoff_table(values, weights, [&](const Vector& v, const Matrix& w) {
        return empirical_lagrangian(model, reg, alpha, v, w);
    });
}

Matrix population_payoffs(const TabularMdp& mdp, const Occupancy& dD, const ValueClass& values,
                          const WeightClass& weights, const Regularizer& reg, double alpha) {
    return payoff_table(values, weights, [&](const Vector& v, const Matrix& w) {
        return population_lagrangian(mdp, dD, reg, alpha, v, w);
    });
}

SaddleSolution solve_exact(const Matrix& payoffs, const ValueClass& values, const WeightClass& weights) {
    check_classes(values, weights);
    if (payoffs.rows() != static_cast<Eigen::Index>(weights.members.size()) ||
        payoffs.cols() != static_cast<Eigen::Index>(values.members.size()))
        throw InvalidArgument("solve_exact: payoff table does not match the classes");
    Eigen::Index best_i = 0;
    Eigen::Index best_j = row_argmin(payoffs, 0);
    for (Eigen::Index i = 1; i < payoffs.rows(); ++i) {
        const Eigen::Index j = row_argmin(payoffs, i);
        if (payoffs(i, j) > payoffs(best_i, best_j)) {
            best_i = i;
            best_j = j;
        }
    }
    const double v = payoffs(best_i, best_j);
    return make_solution(payoffs, values, weights, best_i, best_j, v, v);
}

SaddleSolution solve_exact(const OfflineDataset& data, const ValueClass& values, const WeightClass& weights,
                           const Regularizer& reg, double alpha) {
    const EmpiricalModel model(data);
    return solve_exact(empirical_payoffs(model, values, weights, reg, alpha), values, weights);
}

SaddleSolution solve_inexact(const Matrix& payoffs, const ValueClass& values, const WeightClass& weights,
                             double eps_ov, double eps_ow, std::uint64_t seed) {
    if (!(eps_ov >= 0.0) || !(eps_ow >= 0.0)) throw InvalidArgument("solve_inexact: slacks must be nonnegative");
    if (eps_ov == 0.0 && eps_ow == 0.0) return solve_exact(payoffs, values, weights);
    check_classes(values, weights);
    const Vector row_min = payoffs.rowwise().minCoeff();
    const double max_min = row_min.maxCoeff();
    std::vector<std::pair<Eigen::Index, Eigen::Index>> candidates;
    for (Eigen::Index i = 0; i < payoffs.rows(); ++i) {
        if (max_min - row_min(i) > eps_ow) continue;
        for (Eigen::Index j = 0; j < payoffs.cols(); ++j)
            if (payoffs(i, j) - row_min(i) <= eps_ov) candidates.emplace_back(i, j);
    }
    if (candidates.empty()) throw SolverError("solve_inexact: no pair satisfies the slacks");
    Rng rng(seed);
    const auto [i, j] = candidates[rng.index(candidates.size())];
    return make_solution(payoffs, values, weights, i, j, row_min(i), max_min);
}

SaddleSolution solve_inexact(const OfflineDataset& data, const ValueClass& values, const WeightClass& weights,
                             const Regularizer& reg, double alpha, double eps_ov, double eps_ow, std::uint64_t seed) {
    const EmpiricalModel model(data);
    return solve_inexact(empirical_payoffs(model, values, weights, reg, alpha), values, weights, eps_ov, eps_ow, seed);
}

SaddleCheckReport population_saddle_check(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                          double alpha, const ValueClass& values, const WeightClass& weights,
                                          const Vector& v_star, const Matrix& w_star, double tol) {
    SaddleCheckReport report;
    const auto w_it = std::find(weights.members.begin(), weights.members.end(), w_star);
    const auto v_it = std::find(values.members.begin(), values.members.end(), v_star);
    if (w_it == weights.members.end() || v_it == values.members.end()) return report;
    const Matrix payoffs = population_payoffs(mdp, dD, values, weights, reg, alpha);
    const Vector row_min = payoffs.rowwise().minCoeff();
    const auto star = static_cast<Eigen::Index>(w_it - weights.members.begin());
    report.worst_violation = row_min.maxCoeff() - row_min(star);
    report.status = report.worst_violation <= tol ? SaddleCheckReport::Status::passed
                                                  : SaddleCheckReport::Status::failed;
    return report;
}

}  // namespace prorl
