#include "prorl/bounds.hpp"

#include <cmath>

#include "prorl/error.hpp"

namespace prorl {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw InvalidArgument(msg);
}

double root_log_term(double count, double delta, double samples) {
    return std::sqrt(2.0 * std::log(4.0 * count / delta) / samples);
}

}  // namespace

double stat_error(const StatErrorInputs& in) {
    require(in.n >= 1 && in.n0 >= 1, "stat_error: n and n0 must be at least 1");
    require(in.delta > 0.0 && in.delta < 1.0, "stat_error: delta must lie in (0, 1)");
    require(in.v_size >= 1 && in.w_size >= 1, "stat_error: class sizes must be positive");
    require(in.gamma >= 0.0 && in.gamma < 1.0, "stat_error: gamma must lie in [0, 1)");
    require(in.alpha >= 0.0 && in.b_w >= 0.0 && in.b_f >= 0.0 && in.b_v >= 0.0 && in.b_e >= 0.0,
            "stat_error: constants must be nonnegative");
    const auto v = static_cast<double>(in.v_size);
    const auto w = static_cast<double>(in.w_size);
    return (1.0 - in.gamma) * in.b_v * root_log_term(v, in.delta, static_cast<double>(in.n0)) +
           (in.alpha * in.b_f + in.b_w * in.b_e) * root_log_term(v * w, in.delta, static_cast<double>(in.n));
}

double residual_bound(double b_v, double gamma) { return (1.0 + gamma) * b_v + 1.0; }

double theorem1_rhs(double eps_stat, double alpha, double m_f, double gamma) {
    require(alpha > 0.0, "theorem1_rhs: alpha must be positive");
    require(m_f > 0.0 && eps_stat >= 0.0, "theorem1_rhs: invalid inputs");
    return 4.0 / (1.0 - gamma) * std::sqrt(eps_stat / (alpha * m_f));
}

double robust_rhs(double eps_stat, double eps_opt, double eps_app, double alpha, double m_f, double gamma) {
    require(eps_opt >= 0.0 && eps_app >= 0.0, "robust_rhs: errors must be nonnegative");
    return theorem1_rhs(eps_stat, alpha, m_f, gamma) +
           2.0 / (1.0 - gamma) * std::sqrt(2.0 * (eps_opt + eps_app) / (alpha * m_f));
}

double approximation_error(double eps_rv, double eps_rw, double b_w, double b_e, double alpha, double b_fprime) {
    return (b_w + 1.0) * eps_rv + (b_e + alpha * b_fprime) * eps_rw;
}

double alpha_zero_rhs(double b_w0, double b_wu, double b_wl, double gamma, std::size_t n, std::size_t n0,
                      std::size_t v_size, std::size_t w_size, double delta) {
    require(b_wl > 0.0, "alpha_zero_rhs: B_wl must be positive");
    require(n >= 1 && n0 >= 1, "alpha_zero_rhs: n and n0 must be at least 1");
    const auto v = static_cast<double>(v_size);
    const auto w = static_cast<double>(w_size);
    return 2.0 * b_w0 * b_wu / ((1.0 - gamma) * b_wl) * root_log_term(v * w, delta, static_cast<double>(n)) +
           b_wu / b_wl * root_log_term(v, delta, static_cast<double>(n0));
}

double cloning_term(double b_w, std::size_t n2, std::size_t policy_count, double delta) {
    require(n2 >= 1 && policy_count >= 1, "cloning_term: n2 and |Pi| must be positive");
    return 4.0 * b_w * std::sqrt(6.0 * std::log(4.0 * static_cast<double>(policy_count) / delta) /
                                 static_cast<double>(n2));
}

double cloning_rhs(double b_w, std::size_t n2, std::size_t policy_count, double delta, double eps_stat_n1,
                   double alpha, double m_f) {
    require(alpha > 0.0 && m_f > 0.0, "cloning_rhs: alpha and M_f must be positive");
    return cloning_term(b_w, n2, policy_count, delta) + 50.0 * std::sqrt(eps_stat_n1 / (alpha * m_f));
}

double recommended_alpha(AlphaTarget target, double eps, double b_f) {
    require(eps > 0.0 && b_f > 0.0, "recommended_alpha: eps and B must be positive");
    return target == AlphaTarget::unregularized ? eps / (2.0 * b_f) : eps / (4.0 * b_f);
}

double alpha_un_selector(double eps_opt, double eps_app, double b_f0, double m_f, double gamma,
                         const std::vector<double>& grid) {
    require(!grid.empty(), "alpha_un_selector: empty grid");
    double best_alpha = 0.0;
    double best_value = 0.0;
    for (double alpha : grid) {
        require(alpha > 0.0, "alpha_un_selector: grid values must be positive");
        const double value = alpha * b_f0 + 2.0 / (1.0 - gamma) * std::sqrt(2.0 * (eps_opt + eps_app) / (alpha * m_f));
        if (best_alpha == 0.0 || value < best_value || (value == best_value && alpha < best_alpha)) {
            best_alpha = alpha;
            best_value = value;
        }
    }
    return best_alpha;
}

}  // namespace prorl
