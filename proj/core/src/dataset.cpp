#include "prorl/dataset.hpp"

#include <cmath>

#include "prorl/error.hpp"
#include "prorl/rng.hpp"

namespace prorl {

int sample_categorical(const double* weights, int count, double u) {
    double total = 0.0;
    for (int i = 0; i < count; ++i) total += weights[i];
    const double target = u * total;
    double cum = 0.0;
    int last_positive = -1;
    for (int i = 0; i < count; ++i) {
        if (weights[i] <= 0.0) continue;
        cum += weights[i];
        last_positive = i;
        if (cum > target) return i;
    }
    return last_positive;
}

OfflineDataset generate_dataset(const TabularMdp& mdp, const Occupancy& dD, std::size_t n, std::size_t n0,
                                std::uint64_t seed) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    if (dD.mass.rows() != S || dD.mass.cols() != A) throw InvalidArgument("generate_dataset: dD shape mismatch");
    if (std::abs(dD.total() - 1.0) > 1e-9) throw InvalidArgument("generate_dataset: dD must sum to 1");

    // Row-major flattening so cell index = s*A + a.
    std::vector<double> flat(static_cast<std::size_t>(S * A));
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) flat[static_cast<std::size_t>(mdp.cell(s, a))] = dD.mass(s, a);
    std::vector<double> row(static_cast<std::size_t>(S));
    const Vector& mu0 = mdp.init_dist();

    OfflineDataset data;
    data.num_states = S;
    data.num_actions = A;
    data.gamma = mdp.gamma();
    data.generating_dD = dD;
    data.seed = seed;
    data.transitions.reserve(n);
    data.init_states.reserve(n0);

    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = sample_categorical(flat.data(), S * A, rng.uniform());
        const int s = c / A;
        const int a = c % A;
        for (int k = 0; k < S; ++k) row[static_cast<std::size_t>(k)] = mdp.transition()(c, k);
        const int sp = sample_categorical(row.data(), S, rng.uniform());
        data.transitions.push_back({s, a, mdp.reward()(s, a), sp});
    }
    for (std::size_t j = 0; j < n0; ++j) data.init_states.push_back(sample_categorical(mu0.data(), S, rng.uniform()));
    return data;
}

EmpiricalModel::EmpiricalModel(const OfflineDataset& data)
    : num_states(data.num_states),
      num_actions(data.num_actions),
      gamma(data.gamma),
      cell_freq(Matrix::Zero(data.num_states, data.num_actions)),
      mean_reward(Matrix::Zero(data.num_states, data.num_actions)),
      next_state(Matrix::Zero(data.num_states * data.num_actions, data.num_states)),
      init_freq(Vector::Zero(data.num_states)) {
    if (data.transitions.empty() || data.init_states.empty())
        throw InvalidArgument("empirical model needs n >= 1 and n0 >= 1");
    const int A = num_actions;
    Matrix counts = Matrix::Zero(num_states, num_actions);
    for (const Transition& t : data.transitions) {
        if (t.s < 0 || t.s >= num_states || t.a < 0 || t.a >= A || t.sp < 0 || t.sp >= num_states)
            throw InvalidArgument("dataset transition out of range");
        counts(t.s, t.a) += 1.0;
        mean_reward(t.s, t.a) += t.r;
        next_state(t.s * A + t.a, t.sp) += 1.0;
    }
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < A; ++a) {
            const double c = counts(s, a);
            if (c > 0.0) {
                mean_reward(s, a) /= c;
                next_state.row(s * A + a) /= c;
            }
        }
    }
    cell_freq = counts / static_cast<double>(data.transitions.size());
    for (int s0 : data.init_states) {
        if (s0 < 0 || s0 >= num_states) throw InvalidArgument("dataset initial state out of range");
        init_freq(s0) += 1.0;
    }
    init_freq /= static_cast<double>(data.init_states.size());
}

}  // namespace prorl
