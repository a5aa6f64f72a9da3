#pragma once

#include <Eigen/Dense>
#include <vector>

namespace prorl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Finite discounted MDP.
///
/// Transitions are stored as a (S*A) x S matrix whose row s*A+a is the
/// next-state distribution of (s, a). Rewards are an S x A matrix in [0, 1].
class TabularMdp {
public:
    // The counterexample needs a point-mass initial distribution; everything
    // else requires strictly positive initial mass.
    enum class InitSupport { strict, allow_zero };

    TabularMdp(int num_states, int num_actions, double gamma, Matrix transition, Matrix reward,
               Vector init_dist, InitSupport support = InitSupport::strict);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int num_cells() const { return num_states_ * num_actions_; }
    double gamma() const { return gamma_; }
    int cell(int s, int a) const { return s * num_actions_ + a; }

    const Matrix& transition() const { return transition_; }
    double prob(int s, int a, int next) const { return transition_(cell(s, a), next); }
    const Matrix& reward() const { return reward_; }
    const Vector& init_dist() const { return init_dist_; }
    InitSupport init_support() const { return support_; }

private:
    int num_states_;
    int num_actions_;
    double gamma_;
    Matrix transition_;
    Matrix reward_;
    Vector init_dist_;
    InitSupport support_;
};

/// Row-stochastic S x A matrix of action probabilities.
struct Policy {
    Matrix probs;

    Policy() = default;
    explicit Policy(Matrix p);

    int num_states() const { return static_cast<int>(probs.rows()); }
    int num_actions() const { return static_cast<int>(probs.cols()); }

    static Policy uniform(int num_states, int num_actions);
    static Policy deterministic(const std::vector<int>& actions, int num_actions);
};

/// Nonnegative measure over state-action pairs.
struct Occupancy {
    Matrix mass;

    Occupancy() = default;
    explicit Occupancy(Matrix m);

    Vector marginal() const { return mass.rowwise().sum(); }
    double total() const { return mass.sum(); }
};

struct PolicyValues {
    Vector v;  // V^pi over states
    Matrix q;  // Q^pi over (s, a)
};

Occupancy exact_occupancy(const TabularMdp& mdp, const Policy& policy);

// d(s) - (1-gamma) mu0(s) - gamma sum P(s|s',a') d(s',a'), per state.
Vector flow_residual_vector(const TabularMdp& mdp, const Matrix& mass);
double flow_residual(const TabularMdp& mdp, const Occupancy& occ);

double policy_return(const TabularMdp& mdp, const Policy& policy);
PolicyValues policy_values(const TabularMdp& mdp, const Policy& policy);

// V^a(mu0) - V^b(mu0), evaluated through the performance difference identity.
double performance_difference(const TabularMdp& mdp, const Policy& policy_a, const Policy& policy_b);

// r(s,a) + gamma * sum_s' P(s'|s,a) v(s').
Matrix q_backup(const TabularMdp& mdp, const Vector& v);

// Greedy policy with ties within `tie_tol` going to the lowest action index.
Policy greedy_policy(const Matrix& q, double tie_tol = 1e-12);

// pi(a|s) = mass(s,a) / sum_a mass(s,a); uniform where the row sum is <= threshold.
Policy policy_from_occupancy(const Matrix& mass, double threshold = 1e-12);

struct OptimalValues {
    Vector v;
    Policy policy;
    double bellman_residual = 0.0;
};

// Value iteration to `tol` followed by exact policy-evaluation polishing.
OptimalValues optimal_values(const TabularMdp& mdp, double tol = 1e-12);

}  // namespace prorl
