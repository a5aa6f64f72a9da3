#include "prorl/objective.hpp"

#include <cmath>

#include "prorl/error.hpp"

namespace prorl {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
}

}  // namespace

Matrix residual_ev(const TabularMdp& mdp, const Vector& v) {
    if (v.size() != mdp.num_states()) throw InvalidArgument("residual_ev: v has wrong size");
    Matrix e = q_backup(mdp, v);
    e.colwise() -= v;
    return e;
}

double residual_ev(const Transition& t, double gamma, const Vector& v) {
    return t.r + gamma * v(t.sp) - v(t.s);
}

double population_lagrangian(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
                             const Vector& v, const Matrix& w) {
    check_alpha(alpha);
    const Matrix e = residual_ev(mdp, v);
    double total = (1.0 - mdp.gamma()) * mdp.init_dist().dot(v);
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const double base = dD.mass(s, a);
            if (base <= 0.0) continue;
            total += base * (w(s, a) * e(s, a) - alpha * reg.eval(w(s, a)));
        }
    }
    return total;
}

double empirical_lagrangian(const OfflineDataset& data, const Regularizer& reg, double alpha, const Vector& v,
                            const Matrix& w) {
    check_alpha(alpha);
    if (data.transitions.empty() || data.init_states.empty())
        throw InvalidArgument("empirical_lagrangian: empty dataset");
    double init_sum = 0.0;
    for (int s0 : data.init_states) init_sum += v(s0);
    double sample_sum = 0.0;
    for (const Transition& t : data.transitions) {
        const double wt = w(t.s, t.a);
        sample_sum += -alpha * reg.eval(wt) + wt * residual_ev(t, data.gamma, v);
    }
    return (1.0 - data.gamma) * init_sum / static_cast<double>(data.n0()) +
           sample_sum / static_cast<double>(data.n());
}

double empirical_lagrangian(const EmpiricalModel& model, const Regularizer& reg, double alpha, const Vector& v,
                            const Matrix& w) {
    check_alpha(alpha);
    const int A = model.num_actions;
    const Vector pv = model.next_state * v;
    double total = (1.0 - model.gamma) * model.init_freq.dot(v);
    for (int s = 0; s < model.num_states; ++s) {
        for (int a = 0; a < A; ++a) {
            const double freq = model.cell_freq(s, a);
            if (freq <= 0.0) continue;
            const double e = model.mean_reward(s, a) + model.gamma * pv(s * A + a) - v(s);
            total += freq * (w(s, a) * e - alpha * reg.eval(w(s, a)));
        }
    }
    return total;
}

Vector shifted_data_distribution(const TabularMdp& mdp, const Occupancy& dD) {
    Vector out = Vector::Zero(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (dD.mass(s, a) > 0.0) out += dD.mass(s, a) * mdp.transition().row(mdp.cell(s, a)).transpose();
    return out;
}

double weighted_l1(const Vector& x, const Vector& weights) { return weights.dot(x.cwiseAbs()); }

double weighted_l2(const Matrix& x, const Matrix& weights) {
    return std::sqrt(weights.cwiseProduct(x.cwiseAbs2()).sum());
}

ApproximationErrors approximation_errors(const TabularMdp& mdp, const Occupancy& dD, const Vector& v_star,
                                         const Matrix& w_star, const std::vector<Vector>& values,
                                         const std::vector<Matrix>& weights) {
    if (values.empty() || weights.empty()) throw InvalidArgument("approximation_errors: empty class");
    const Vector d_state = dD.marginal();
    const Vector d_shift = shifted_data_distribution(mdp, dD);
    ApproximationErrors out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Vector diff = values[i] - v_star;
        const double err = weighted_l1(diff, mdp.init_dist()) + weighted_l1(diff, d_state) + weighted_l1(diff, d_shift);
        if (i == 0 || err < out.eps_rv) {
            out.eps_rv = err;
            out.best_v = i;
        }
    }
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const double err = dD.mass.cwiseProduct((weights[j] - w_star).cwiseAbs()).sum();
        if (j == 0 || err < out.eps_rw) {
            out.eps_rw = err;
            out.best_w = j;
        }
    }
    return out;
}

}  // namespace prorl
