#pragma once

#include <cmath>
#include <vector>

#include "prorl/mdp.hpp"
#include "prorl/rng.hpp"

namespace prorl::test {

// One state, one action, self loop.
inline TabularMdp single_state(double reward, double gamma = 0.9) {
    return TabularMdp(1, 1, gamma, Matrix::Ones(1, 1), Matrix::Constant(1, 1, reward), Vector::Ones(1));
}

// Two states that swap deterministically; one action.
inline TabularMdp two_cycle(double gamma) {
    Matrix p(2, 2);
    p << 0, 1, 1, 0;
    return TabularMdp(2, 1, gamma, p, Matrix::Zero(2, 1), Vector::Constant(2, 0.5));
}

// Chain 0 -> 1 -> ... -> S-1 (absorbing) under action 1, stay under action 0.
// Reward 1 only at the last state.
inline TabularMdp chain(int S, double gamma) {
    Matrix p = Matrix::Zero(2 * S, S);
    Matrix r = Matrix::Zero(S, 2);
    for (int s = 0; s < S; ++s) {
        p(2 * s, s) = 1.0;
        p(2 * s + 1, std::min(s + 1, S - 1)) = 1.0;
    }
    r.row(S - 1).setOnes();
    return TabularMdp(S, 2, gamma, p, r, Vector::Constant(S, 1.0 / S));
}

inline TabularMdp with_reward(const TabularMdp& mdp, const Matrix& reward) {
    return TabularMdp(mdp.num_states(), mdp.num_actions(), mdp.gamma(), mdp.transition(), reward, mdp.init_dist(),
                      mdp.init_support());
}

// Row-stochastic transition matrix of the state chain induced by a policy.
inline Matrix state_chain(const TabularMdp& mdp, const Policy& pi) {
    const int S = mdp.num_states(), A = mdp.num_actions();
    Matrix m = Matrix::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) m.row(s) += pi.probs(s, a) * mdp.transition().row(s * A + a);
    return m;
}

// V^pi by repeated Bellman backups.
inline Vector power_iteration_values(const TabularMdp& mdp, const Policy& pi, int sweeps = 2000) {
    const Matrix chain_matrix = state_chain(mdp, pi);
    const Vector r = mdp.reward().cwiseProduct(pi.probs).rowwise().sum();
    Vector v = Vector::Zero(mdp.num_states());
    for (int i = 0; i < sweeps; ++i) v = r + mdp.gamma() * chain_matrix * v;
    return v;
}

// Normalized occupancy from the Neumann series (1-gamma) sum_t gamma^t mu0^T P_pi^t.
inline Matrix series_occupancy(const TabularMdp& mdp, const Policy& pi, int terms = 2000) {
    const Matrix chain_matrix = state_chain(mdp, pi);
    Eigen::RowVectorXd dist = mdp.init_dist().transpose();
    Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(mdp.num_states());
    double weight = 1.0 - mdp.gamma();
    for (int t = 0; t < terms; ++t) {
        total += weight * dist;
        dist = dist * chain_matrix;
        weight *= mdp.gamma();
    }
    Matrix mass(mdp.num_states(), mdp.num_actions());
    for (int s = 0; s < mdp.num_states(); ++s) mass.row(s) = total(s) * pi.probs.row(s);
    return mass;
}

inline int draw(const Eigen::RowVectorXd& probs, double u) {
    double acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return i;
    }
    return static_cast<int>(probs.size()) - 1;
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace prorl::test
