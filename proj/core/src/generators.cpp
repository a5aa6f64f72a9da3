#include "prorl/generators.hpp"

#include <algorithm>

#include "prorl/error.hpp"
#include "prorl/rng.hpp"

namespace prorl {

namespace {

Vector random_row(Rng& rng, int size, double zero_prob) {
    Vector row(size);
    for (int k = 0; k < size; ++k) row(k) = rng.uniform() < zero_prob ? 0.0 : rng.uniform();
    const auto keep = static_cast<int>(rng.index(static_cast<std::uint64_t>(size)));
    row(keep) = std::max(row(keep), 0.05 + rng.uniform());
    row /= row.sum();
    // Renormalize once more so the row sums to 1 to the last bit we can get.
    row(keep) += 1.0 - row.sum();
    return row;
}

}  // namespace

Vector random_distribution(int size, std::uint64_t seed, double floor) {
    Rng rng(seed);
    Vector p(size);
    for (int k = 0; k < size; ++k) p(k) = floor + rng.uniform();
    p /= p.sum();
    p(0) += 1.0 - p.sum();
    return p;
}

Policy random_policy(int num_states, int num_actions, std::uint64_t seed, double floor) {
    Matrix p(num_states, num_actions);
    for (int s = 0; s < num_states; ++s)
        p.row(s) = random_distribution(num_actions, mix_seed(seed, static_cast<std::uint64_t>(s)), floor).transpose();
    return Policy(std::move(p));
}

TabularMdp random_mdp(int num_states, int num_actions, double gamma, std::uint64_t seed,
                      const RandomMdpOptions& options) {
    Rng rng(seed);
    Matrix transition(num_states * num_actions, num_states);
    for (int c = 0; c < num_states * num_actions; ++c)
        transition.row(c) = random_row(rng, num_states, options.zero_prob).transpose();
    Matrix reward(num_states, num_actions);
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) reward(s, a) = rng.uniform();
    Vector init = random_distribution(num_states, rng.bits(), 0.2);
    return TabularMdp(num_states, num_actions, gamma, std::move(transition), std::move(reward), std::move(init));
}

TabularMdp ergodic_mdp(int num_states, int num_actions, double gamma, double mixing, std::uint64_t seed) {
    if (!(mixing > 0.0 && mixing <= 1.0)) throw InvalidArgument("ergodic_mdp: mixing must lie in (0, 1]");
    Rng rng(seed);
    const Vector init = random_distribution(num_states, rng.bits(), 0.5);
    Matrix transition(num_states * num_actions, num_states);
    for (int c = 0; c < num_states * num_actions; ++c) {
        Vector row = (1.0 - mixing) * random_row(rng, num_states, 0.5) + mixing * init;
        row(0) += 1.0 - row.sum();
        transition.row(c) = row.transpose();
    }
    Matrix reward(num_states, num_actions);
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) reward(s, a) = rng.uniform();
    return TabularMdp(num_states, num_actions, gamma, std::move(transition), std::move(reward), init);
}

TabularMdp tied_optimum_mdp(double gamma) {
    // State 0: both actions lead to states 1 and 2 with different odds.
    // States 1, 2: action 0 pays rho_s and returns to 0; action 1 pays 0 and returns to 0.
    // V(1) - V(2) = rho_1 - rho_2 for any V(0), so the state-0 reward below makes
    // both state-0 actions exactly tied.
    const double rho1 = 0.8;
    const double rho2 = 0.4;
    const double p0 = 0.8;
    const double p1 = 0.3;
    Matrix transition = Matrix::Zero(6, 3);
    transition.row(0) << 0.0, p0, 1.0 - p0;
    transition.row(1) << 0.0, p1, 1.0 - p1;
    transition.row(2) << 1.0, 0.0, 0.0;
    transition.row(3) << 0.5, 0.0, 0.5;
    transition.row(4) << 1.0, 0.0, 0.0;
    transition.row(5) << 0.5, 0.5, 0.0;
    Matrix reward(3, 2);
    const double r00 = 0.3;
    // r(0,1) + gamma (p1 V1 + (1-p1) V2) = r(0,0) + gamma (p0 V1 + (1-p0) V2).
    reward << r00, r00 + gamma * (p0 - p1) * (rho1 - rho2), rho1, 0.0, rho2, 0.0;
    Vector init = Vector::Constant(3, 1.0 / 3.0);
    return TabularMdp(3, 2, gamma, std::move(transition), std::move(reward), std::move(init));
}

Occupancy behavior_occupancy(const TabularMdp& mdp, const Policy& behavior) { return exact_occupancy(mdp, behavior); }

Policy behavior_policy(const Occupancy& dD) { return policy_from_occupancy(dD.mass, 0.0); }

TabularMdp graded_gap_mdp(int num_states, int num_actions, const std::vector<double>& gaps, double gamma,
                          double mixing, std::uint64_t seed) {
    const int S = num_states, A = num_actions;
    if (S < 1 || A < 2) throw InvalidArgument("graded_gap_mdp: needs at least one state and two actions");
    if (static_cast<int>(gaps.size()) != S * (A - 1)) throw InvalidArgument("graded_gap_mdp: need S * (A - 1) gaps");
    if (!(mixing > 0.0 && mixing <= 1.0)) throw InvalidArgument("graded_gap_mdp: mixing must lie in (0, 1]");
    double g_max = 0.0;
    for (double g : gaps) {
        if (!(g >= 0.0 && g <= 0.5)) throw InvalidArgument("graded_gap_mdp: gaps must lie in [0, 0.5]");
        g_max = std::max(g_max, g);
    }
    Rng rng(seed);
    const Vector init = random_distribution(S, rng.bits(), 0.5);
    Matrix transition(S * A, S);
    for (int c = 0; c < S * A; ++c) {
        Vector q(S);
        for (int s = 0; s < S; ++s) q(s) = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
        if (q.sum() == 0.0) q(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(S)))) = 1.0;
        q /= q.sum();
        Vector row = (1.0 - mixing) * q + mixing * init;
        row(0) += 1.0 - row.sum();
        transition.row(c) = row.transpose();
    }
    // r = v - gamma P v - gap stays in [0, 1] when |v - center| <= (1/2 - g_max/2) / (1 + gamma).
    const double width = 0.95 * (0.5 - g_max / 2.0) / (1.0 + gamma);
    Vector v(S);
    for (int s = 0; s < S; ++s) v(s) = (0.5 + g_max / 2.0) / (1.0 - gamma) + width * rng.uniform(-1.0, 1.0);
    Matrix reward(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double gap = a == 0 ? 0.0 : gaps[static_cast<std::size_t>(s * (A - 1) + a - 1)];
            reward(s, a) = v(s) - gamma * transition.row(s * A + a).dot(v) - gap;
        }
    return TabularMdp(S, A, gamma, std::move(transition), std::move(reward), init);
}

}  // namespace prorl
