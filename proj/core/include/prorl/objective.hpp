#pragma once

#include <cstddef>
#include <vector>

#include "prorl/dataset.hpp"
#include "prorl/mdp.hpp"
#include "prorl/regularizer.hpp"

namespace prorl {

// e_v(s,a) = r(s,a) + gamma sum_s' P(s'|s,a) v(s') - v(s).
Matrix residual_ev(const TabularMdp& mdp, const Vector& v);

// Sampled e_v for one transition: r + gamma v(s') - v(s).
double residual_ev(const Transition& t, double gamma, const Vector& v);

// L(v,w) = (1-gamma) E_mu0[v] - alpha E_dD[f(w)] + E_dD[w e_v]; cells with dD = 0 are skipped.
double population_lagrangian(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
                             const Vector& v, const Matrix& w);

// Direct per-sample evaluation of the empirical Lagrangian.
double empirical_lagrangian(const OfflineDataset& data, const Regularizer& reg, double alpha, const Vector& v,
                            const Matrix& w);

// Same value computed from sufficient statistics; used for class enumeration.
double empirical_lagrangian(const EmpiricalModel& model, const Regularizer& reg, double alpha, const Vector& v,
                            const Matrix& w);

// dD'(s) = sum_{s',a'} dD(s',a') P(s|s',a').
Vector shifted_data_distribution(const TabularMdp& mdp, const Occupancy& dD);

double weighted_l1(const Vector& x, const Vector& weights);
double weighted_l2(const Matrix& x, const Matrix& weights);

struct ApproximationErrors {
    double eps_rv = 0.0;
    double eps_rw = 0.0;
    std::size_t best_v = 0;
    std::size_t best_w = 0;
};

ApproximationErrors approximation_errors(const TabularMdp& mdp, const Occupancy& dD, const Vector& v_star,
                                         const Matrix& w_star, const std::vector<Vector>& values,
                                         const std::vector<Matrix>& weights);

}  // namespace prorl
