#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace prorl {

struct StatErrorInputs {
    std::size_t n = 1;
    std::size_t n0 = 1;
    double alpha = 0.0;
    double gamma = 0.0;
    double b_w = 0.0;
    double b_f = 0.0;
    double b_v = 0.0;
    double b_e = 0.0;
    std::size_t v_size = 1;
    std::size_t w_size = 1;
    double delta = 0.1;
};

// (1-gamma) B_v sqrt(2 log(4|V|/delta) / n0) + (alpha B_f + B_w B_e) sqrt(2 log(4|V||W|/delta) / n)
double stat_error(const StatErrorInputs& in);

// B_e = (1 + gamma) B_v + 1
double residual_bound(double b_v, double gamma);

// (4 / (1-gamma)) sqrt(eps / (alpha M_f))
double theorem1_rhs(double eps_stat, double alpha, double m_f, double gamma);

// theorem1_rhs plus (2 / (1-gamma)) sqrt(2 (eps_opt + eps_app) / (alpha M_f))
double robust_rhs(double eps_stat, double eps_opt, double eps_app, double alpha, double m_f, double gamma);

// (B_w + 1) eps_rv + (B_e + alpha B_f') eps_rw
double approximation_error(double eps_rv, double eps_rw, double b_w, double b_e, double alpha, double b_fprime);

// J(pi*_0) - J(pi_hat) bound for alpha = 0 under strong concentrability.
double alpha_zero_rhs(double b_w0, double b_wu, double b_wl, double gamma, std::size_t n, std::size_t n0,
                      std::size_t v_size, std::size_t w_size, double delta);

// 4 B_w sqrt(6 log(4|Pi|/delta) / n2): the cloning term, in total-variation units.
double cloning_term(double b_w, std::size_t n2, std::size_t policy_count, double delta);

// E_{d*}||pi* - pi_bar||_1 bound: cloning term + 50 sqrt(eps(n1) / (alpha M_f)).
double cloning_rhs(double b_w, std::size_t n2, std::size_t policy_count, double delta, double eps_stat_n1,
                   double alpha, double m_f);

enum class AlphaTarget { unregularized, constrained };

// eps / (2 B_f0) for the unregularized target, eps / (4 B_f) for the constrained one.
double recommended_alpha(AlphaTarget target, double eps, double b_f);

// Grid argmin of alpha B_f0 + (2/(1-gamma)) sqrt(2 (eps_opt + eps_app) / (alpha M_f)); ties to the smallest alpha.
double alpha_un_selector(double eps_opt, double eps_app, double b_f0, double m_f, double gamma,
                         const std::vector<double>& grid);

struct BoundReport {
    double eps_stat = 0.0;
    double rhs_theorem1 = 0.0;
    std::optional<double> rhs_cloning;
    double b_v = 0.0;
    double b_e = 0.0;
    double b_f = 0.0;
    double b_fprime = 0.0;
    double b_w = 0.0;
    double alpha = 0.0;
    double m_f = 0.0;
    double gamma = 0.0;
    std::size_t n = 0;
    std::size_t n0 = 0;
    double delta = 0.0;
};

}  // namespace prorl
