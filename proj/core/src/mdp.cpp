#include "prorl/mdp.hpp"

#include <cmath>
#include <string>

#include "prorl/error.hpp"

namespace prorl {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void check_stochastic_rows(const Matrix& m, const char* what) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if ((m.row(i).array() < 0.0).any())
            throw InvalidArgument(std::string(what) + ": negative entry in row " + std::to_string(i));
        if (std::abs(m.row(i).sum() - 1.0) > 1e-12)
            throw InvalidArgument(std::string(what) + ": row " + std::to_string(i) +
                                  " does not sum to 1");
    }
}

Matrix policy_transition(const TabularMdp& mdp, const Policy& policy) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    Matrix p = Matrix::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            if (policy.probs(s, a) != 0.0) p.row(s) += policy.probs(s, a) * mdp.transition().row(mdp.cell(s, a));
    return p;
}

void check_shapes(const TabularMdp& mdp, const Policy& policy) {
    require(policy.num_states() == mdp.num_states() && policy.num_actions() == mdp.num_actions(),
            "policy shape does not match the MDP");
}

}  // namespace

TabularMdp::TabularMdp(int num_states, int num_actions, double gamma, Matrix transition, Matrix reward,
                       Vector init_dist, InitSupport support)
    : num_states_(num_states),
      num_actions_(num_actions),
      gamma_(gamma),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      init_dist_(std::move(init_dist)),
      support_(support) {
    require(num_states > 0 && num_actions > 0, "MDP needs at least one state and one action");
    require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    require(transition_.rows() == num_cells() && transition_.cols() == num_states,
            "transition must be (S*A) x S");
    require(reward_.rows() == num_states && reward_.cols() == num_actions, "reward must be S x A");
    require(init_dist_.size() == num_states, "init_dist must have S entries");
    require(all_finite(transition_) && all_finite(reward_) && init_dist_.allFinite(), "MDP has non-finite entries");
    check_stochastic_rows(transition_, "transition");
    require((reward_.array() >= 0.0).all() && (reward_.array() <= 1.0).all(), "rewards must lie in [0, 1]");
    require(std::abs(init_dist_.sum() - 1.0) <= 1e-12, "init_dist must sum to 1");
    require((init_dist_.array() >= 0.0).all(), "init_dist must be nonnegative");
    if (support_ == InitSupport::strict)
        require((init_dist_.array() > 0.0).all(), "init_dist must be strictly positive");
}

Policy::Policy(Matrix p) : probs(std::move(p)) {
    require(probs.rows() > 0 && probs.cols() > 0 && probs.allFinite(), "policy must be a finite nonempty matrix");
    check_stochastic_rows(probs, "policy");
}

Policy Policy::uniform(int num_states, int num_actions) {
    return Policy(Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
}

Policy Policy::deterministic(const std::vector<int>& actions, int num_actions) {
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(actions.size()), num_actions);
    for (std::size_t s = 0; s < actions.size(); ++s) {
        require(actions[s] >= 0 && actions[s] < num_actions, "action index out of range");
        p(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
    }
    return Policy(std::move(p));
}

Occupancy::Occupancy(Matrix m) : mass(std::move(m)) {
    require(mass.allFinite(), "occupancy has non-finite entries");
    require((mass.array() >= 0.0).all(), "occupancy must be nonnegative");
}

Occupancy exact_occupancy(const TabularMdp& mdp, const Policy& policy) {
    check_shapes(mdp, policy);
    const int S = mdp.num_states();
    const Matrix system = Matrix::Identity(S, S) - mdp.gamma() * policy_transition(mdp, policy).transpose();
    const Vector rhs = (1.0 - mdp.gamma()) * mdp.init_dist();
    Vector d = system.partialPivLu().solve(rhs);
    if (!d.allFinite()) throw SolverError("occupancy linear solve failed");
    // Round-off can leave entries like -1e-18 on unreachable states.
    d = d.cwiseMax(0.0);
    Matrix mass(S, mdp.num_actions());
    for (int s = 0; s < S; ++s) mass.row(s) = d(s) * policy.probs.row(s);
    return Occupancy(std::move(mass));
}

Vector flow_residual_vector(const TabularMdp& mdp, const Matrix& mass) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    require(mass.rows() == S && mass.cols() == A, "occupancy shape does not match the MDP");
    Vector inflow = (1.0 - mdp.gamma()) * mdp.init_dist();
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            if (mass(s, a) != 0.0) inflow += mdp.gamma() * mass(s, a) * mdp.transition().row(mdp.cell(s, a)).transpose();
    return Vector(mass.rowwise().sum()) - inflow;
}

double flow_residual(const TabularMdp& mdp, const Occupancy& occ) {
    return flow_residual_vector(mdp, occ.mass).cwiseAbs().maxCoeff();
}

double policy_return(const TabularMdp& mdp, const Policy& policy) {
    return exact_occupancy(mdp, policy).mass.cwiseProduct(mdp.reward()).sum();
}

Matrix q_backup(const TabularMdp& mdp, const Vector& v) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    const Vector pv = mdp.transition() * v;
    Matrix q(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) q(s, a) = mdp.reward()(s, a) + mdp.gamma() * pv(mdp.cell(s, a));
    return q;
}

PolicyValues policy_values(const TabularMdp& mdp, const Policy& policy) {
    check_shapes(mdp, policy);
    const int S = mdp.num_states();
    const Vector r_pi = policy.probs.cwiseProduct(mdp.reward()).rowwise().sum();
    const Matrix system = Matrix::Identity(S, S) - mdp.gamma() * policy_transition(mdp, policy);
    Vector v = system.partialPivLu().solve(r_pi);
    if (!v.allFinite()) throw SolverError("policy evaluation linear solve failed");
    Matrix q = q_backup(mdp, v);
    return {std::move(v), std::move(q)};
}

double performance_difference(const TabularMdp& mdp, const Policy& policy_a, const Policy& policy_b) {
    const Vector d_a = exact_occupancy(mdp, policy_a).marginal();
    const Matrix q_b = policy_values(mdp, policy_b).q;
    const Vector advantage = q_b.cwiseProduct(policy_a.probs - policy_b.probs).rowwise().sum();
    return d_a.dot(advantage) / (1.0 - mdp.gamma());
}

Policy greedy_policy(const Matrix& q, double tie_tol) {
    std::vector<int> actions(static_cast<std::size_t>(q.rows()));
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        const double best = q.row(s).maxCoeff();
        int choice = 0;
        while (q(s, choice) < best - tie_tol) ++choice;
        actions[static_cast<std::size_t>(s)] = choice;
    }
    return Policy::deterministic(actions, static_cast<int>(q.cols()));
}

Policy policy_from_occupancy(const Matrix& mass, double threshold) {
    Matrix p(mass.rows(), mass.cols());
    for (Eigen::Index s = 0; s < mass.rows(); ++s) {
        const double total = mass.row(s).sum();
        if (total <= threshold)
            p.row(s).setConstant(1.0 / static_cast<double>(mass.cols()));
        else
            p.row(s) = mass.row(s) / total;
    }
    return Policy(std::move(p));
}

OptimalValues optimal_values(const TabularMdp& mdp, double tol) {
    Vector v = Vector::Zero(mdp.num_states());
    const double stop = tol * (1.0 - mdp.gamma());
    for (int it = 0; it < 1'000'000; ++it) {
        Vector next = q_backup(mdp, v).rowwise().maxCoeff();
        const double change = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (change <= stop) break;
    }
    // Polish with policy iteration so the greedy policy's values are exact.
    Policy policy = greedy_policy(q_backup(mdp, v));
    for (int it = 0; it < 1000; ++it) {
        v = policy_values(mdp, policy).v;
        Policy next = greedy_policy(q_backup(mdp, v));
        if (next.probs == policy.probs) break;
        policy = std::move(next);
    }
    const double residual = (q_backup(mdp, v).rowwise().maxCoeff() - v).cwiseAbs().maxCoeff();
    return {std::move(v), std::move(policy), residual};
}

}  // namespace prorl
