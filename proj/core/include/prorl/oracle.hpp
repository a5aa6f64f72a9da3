#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prorl/mdp.hpp"
#include "prorl/regularizer.hpp"

namespace prorl {

enum class SolverPath {
    dual_newton,   // semismooth Newton on the concave dual in v, w eliminated in closed form
    extragradient  // projected extragradient on (v, w) with exact population gradients
};

struct OracleOptions {
    SolverPath path = SolverPath::dual_newton;
    std::optional<double> cap;  // B_w for the constrained variant
    double tolerance = 1e-10;   // target KKT residual
    long max_iterations = 1'000'000;
};

/// Exact optimum of the regularized (optionally capped) occupancy LP.
struct RegularizedSolution {
    Vector v_star;
    Matrix w_star;  // zero on cells with dD = 0
    Occupancy d_star;
    Policy pi_star;
    double alpha = 0.0;
    std::optional<double> cap;
    double kkt_residual = 0.0;
    std::vector<int> nonunique_states;  // states where v_star is not pinned down
    long iterations = 0;
    SolverPath path = SolverPath::dual_newton;
};

RegularizedSolution solve_regularized(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                      double alpha, const OracleOptions& options = {});

// w(s,a) = clip((f')^{-1}(e_v(s,a)/alpha), 0, cap) on covered cells, 0 elsewhere.
Matrix kkt_weights(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
                   const Vector& v, std::optional<double> cap);

// max(flow residual of w*dD, max covered-cell deviation of w from kkt_weights(v)).
double kkt_residual(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
                    const Vector& v, const Matrix& w, std::optional<double> cap);

struct UnregularizedSolution {
    Vector v;
    Policy pi;
    Occupancy d;
};

UnregularizedSolution solve_unregularized(const TabularMdp& mdp);

struct Concentrability {
    double b_w = 0.0;
    bool feasible = true;
};

Concentrability concentrability(const Occupancy& d_target, const Occupancy& dD);

struct StrongConcentrabilityOptions {
    double max_enumeration = 1e6;
    bool allow_sampling = false;
    std::size_t sample_count = 10000;
    std::uint64_t seed = 0;
};

struct StrongConcentrability {
    double b_wu = 0.0;
    double b_wl = 0.0;
    bool holds = false;
    bool sampled = false;
    std::size_t policies_checked = 0;
};

StrongConcentrability strong_concentrability_check(const TabularMdp& mdp, const Occupancy& dD, const Occupancy& d0,
                                                   const StrongConcentrabilityOptions& options = {});

struct StabilityRow {
    double alpha;
    Matrix w_star;
    double v_gap;  // ||v*_alpha - v*_0||_{2,dD}
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    std::size_t constant_prefix = 0;  // trailing run of smallest alphas with identical w*
    double slope = 0.0;               // v_gap ~ slope * alpha through the origin on that run
    double r_squared = 0.0;
};

StabilityReport lp_stability_sweep(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                   const std::vector<double>& alphas, double tolerance = 1e-6);

}  // namespace prorl
