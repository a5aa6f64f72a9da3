#include "prorl/extraction.hpp"

#include "prorl/error.hpp"

namespace prorl {

ExtractionResult extract_policy(const Matrix& w, const Policy& behavior, double threshold) {
    if (w.rows() != behavior.probs.rows() || w.cols() != behavior.probs.cols())
        throw InvalidArgument("extract_policy: shape mismatch");
    if ((w.array() < 0.0).any()) throw InvalidArgument("extract_policy: weights must be nonnegative");
    const Matrix joint = w.cwiseProduct(behavior.probs);
    ExtractionResult out;
    Matrix p(w.rows(), w.cols());
    for (Eigen::Index s = 0; s < w.rows(); ++s) {
        const double total = joint.row(s).sum();
        if (total <= threshold) {
            p.row(s).setConstant(1.0 / static_cast<double>(w.cols()));
            out.zero_mass_states.push_back(static_cast<int>(s));
        } else {
            p.row(s) = joint.row(s) / total;
        }
    }
    out.policy = Policy(std::move(p));
    return out;
}

double clone_objective(const Matrix& weighted_counts, const Policy& policy, const std::vector<Matrix>& witnesses) {
    const Vector state_weight = weighted_counts.rowwise().sum();
    double best = 0.0;
    for (std::size_t k = 0; k < witnesses.size(); ++k) {
        const Matrix& h = witnesses[k];
        const Vector h_pi = policy.probs.cwiseProduct(h).rowwise().sum();
        const double value = state_weight.dot(h_pi) - weighted_counts.cwiseProduct(h).sum();
        if (k == 0 || value > best) best = value;
    }
    return best;
}

CloneResult clone_policy(const Matrix& w_hat, const OfflineDataset& data, const PolicyClass& policies,
                         const std::vector<Matrix>& witnesses) {
    if (policies.members.empty() || witnesses.empty()) throw InvalidArgument("clone_policy: empty class");
    if (data.transitions.empty()) throw InvalidArgument("clone_policy: empty dataset");
    Matrix weighted = Matrix::Zero(w_hat.rows(), w_hat.cols());
    for (const Transition& t : data.transitions) weighted(t.s, t.a) += w_hat(t.s, t.a);
    CloneResult out;
    for (std::size_t i = 0; i < policies.members.size(); ++i) {
        const double value = clone_objective(weighted, policies.members[i], witnesses);
        if (i == 0 || value < out.objective) {
            out.objective = value;
            out.index = i;
        }
    }
    out.policy = policies.members[out.index];
    return out;
}

CloneResult clone_policy(const Matrix& w_hat, const OfflineDataset& data, const PolicyClass& policies) {
    return clone_policy(w_hat, data, policies, witness_class(policies));
}

std::pair<OfflineDataset, OfflineDataset> split_dataset(const OfflineDataset& data, std::size_t n1) {
    if (n1 > data.n()) throw InvalidArgument("split_dataset: n1 exceeds the dataset size");
    if (n1 == 0 || n1 == data.n()) throw InvalidArgument("split_dataset: both parts must be nonempty");
    OfflineDataset first = data;
    OfflineDataset second = data;
    first.transitions.assign(data.transitions.begin(), data.transitions.begin() + static_cast<std::ptrdiff_t>(n1));
    second.transitions.assign(data.transitions.begin() + static_cast<std::ptrdiff_t>(n1), data.transitions.end());
    second.init_states.clear();
    return {std::move(first), std::move(second)};
}

}  // namespace prorl
