#include "prorl/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

#include "prorl/error.hpp"
#include "prorl/rng.hpp"

namespace prorl {

namespace {

constexpr double kCoverTol = 1e-12;

struct Cell {
    int s;
    int a;
    int row;
    double base;
};

// Shared data for both solver paths.
class Problem {
public:
    Problem(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
            std::optional<double> cap)
        : mdp_(mdp), dD_(dD), reg_(reg), alpha_(alpha), cap_(cap) {
        for (int s = 0; s < mdp.num_states(); ++s)
            for (int a = 0; a < mdp.num_actions(); ++a)
                if (dD.mass(s, a) > 0.0) cells_.push_back({s, a, mdp.cell(s, a), dD.mass(s, a)});
        if (cells_.empty()) throw InvalidArgument("data distribution has no covered cell");
        upper_ = cap ? *cap : std::numeric_limits<double>::infinity();
    }

    const std::vector<Cell>& cells() const { return cells_; }
    int num_states() const { return mdp_.num_states(); }
    double gamma() const { return mdp_.gamma(); }
    double upper() const { return upper_; }
    double alpha() const { return alpha_; }
    const Regularizer& reg() const { return reg_; }

    // e_v on covered cells.
    Vector residuals(const Vector& v) const {
        const Vector pv = mdp_.transition() * v;
        Vector e(static_cast<Eigen::Index>(cells_.size()));
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const Cell& c = cells_[i];
            e(static_cast<Eigen::Index>(i)) = mdp_.reward()(c.s, c.a) + gamma() * pv(c.row) - v(c.s);
        }
        return e;
    }

    double best_response(double e, double upper) const {
        return std::clamp(reg_.deriv_inverse(e / alpha_), 0.0, upper);
    }

    // (1-gamma) mu0 + sum_c dD_c w_c (gamma P_c - 1_s): the gradient of L in v.
    Vector v_gradient(const Vector& w) const {
        Vector g = (1.0 - gamma()) * mdp_.init_dist();
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const Cell& c = cells_[i];
            const double mass = c.base * w(static_cast<Eigen::Index>(i));
            if (mass == 0.0) continue;
            g += gamma() * mass * mdp_.transition().row(c.row).transpose();
            g(c.s) -= mass;
        }
        return g;
    }

    Vector direction(const Cell& c) const {
        Vector a = gamma() * mdp_.transition().row(c.row).transpose();
        a(c.s) -= 1.0;
        return a;
    }

    Matrix to_matrix(const Vector& w) const {
        Matrix out = Matrix::Zero(mdp_.num_states(), mdp_.num_actions());
        for (std::size_t i = 0; i < cells_.size(); ++i) out(cells_[i].s, cells_[i].a) = w(static_cast<Eigen::Index>(i));
        return out;
    }

    // States that receive required flow but have no covered cell.
    void check_coverage() const {
        if (cap_) return;
        for (int s = 0; s < mdp_.num_states(); ++s) {
            if (mdp_.init_dist()(s) <= 0.0) continue;
            bool covered = false;
            for (const Cell& c : cells_) covered = covered || c.s == s;
            if (!covered)
                throw InfeasibleError(s, "flow at state " + std::to_string(s) +
                                             " cannot be met: initial mass but no data coverage");
        }
    }

private:
    const TabularMdp& mdp_;
    const Occupancy& dD_;
    const Regularizer& reg_;
    double alpha_;
    std::optional<double> cap_;
    std::vector<Cell> cells_;
    double upper_;
};

struct DualEval {
    double value;
    Vector w;
    Vector grad;
};

DualEval dual_eval(const Problem& p, const Vector& v) {
    const Vector e = p.residuals(v);
    Vector w(e.size());
    double value = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        const Cell& c = p.cells()[static_cast<std::size_t>(i)];
        w(i) = p.best_response(e(i), p.upper());
        value += c.base * (w(i) * e(i) - p.alpha() * p.reg().eval(w(i)));
    }
    return {value, w, p.v_gradient(w)};
}

double dual_objective(const Problem& p, const Vector& v, const Vector& mu0_term) {
    const Vector e = p.residuals(v);
    double value = mu0_term.dot(v);
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double w = p.best_response(e(i), p.upper());
        value += p.cells()[static_cast<std::size_t>(i)].base * (w * e(i) - p.alpha() * p.reg().eval(w));
    }
    return value;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

int largest_entry(const Vector& x) {
    Eigen::Index idx = 0;
    x.cwiseAbs().maxCoeff(&idx);
    return static_cast<int>(idx);
}

// Minimizes G(v) = max_{w in box} L(v, w), a convex piecewise-quadratic function,
// by Levenberg-damped semismooth Newton with Armijo backtracking.
std::pair<Vector, long> solve_dual_newton(const Problem& p, const TabularMdp& mdp, const OracleOptions& opt) {
    const int S = p.num_states();
    const Vector mu0_term = (1.0 - p.gamma()) * mdp.init_dist();
    const double curvature = 1.0 / (p.alpha() * p.reg().strong_convexity());
    const double divergence_limit = 1e8 / (1.0 - p.gamma());
    // Rewards are nonnegative, so a feasible capped problem has optimum >= -alpha B_f(cap);
    // by weak duality G can only fall below that when the primal is infeasible.
    const double primal_floor = std::isfinite(p.upper())
                                    ? -p.alpha() * p.reg().bounds(p.upper()).b_f - 1e-9
                                    : -std::numeric_limits<double>::infinity();
    Vector v = Vector::Zero(S);
    long it = 0;
    for (; it < std::min<long>(opt.max_iterations, 10000); ++it) {
        DualEval cur = dual_eval(p, v);
        const double value = cur.value + mu0_term.dot(v);
        const double gnorm = cur.grad.lpNorm<Eigen::Infinity>();
        if (gnorm <= 1e-14) break;
        if (value < primal_floor) {
            const int s = largest_entry(cur.grad);
            throw InfeasibleError(s, "flow at state " + std::to_string(s) +
                                         " cannot be met under the support/cap constraints");
        }

        Matrix h = Matrix::Zero(S, S);
        for (std::size_t i = 0; i < p.cells().size(); ++i) {
            const double w = cur.w(static_cast<Eigen::Index>(i));
            if (w <= 0.0 || w >= p.upper()) continue;
            const Vector a = p.direction(p.cells()[i]);
            h.noalias() += (p.cells()[i].base * curvature) * a * a.transpose();
        }
        const double damping = 1e-12 * (1.0 + h.diagonal().maxCoeff()) + std::min(gnorm, 1e-3);
        h.diagonal().array() += damping;
        const Vector step = h.ldlt().solve(-cur.grad);
        const double slope = cur.grad.dot(step);

        double t = 1.0;
        Vector trial;
        bool accepted = false;
        for (int k = 0; k < 200; ++k) {
            trial = v + t * step;
            if (dual_objective(p, trial, mu0_term) <= value + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            // Near the optimum G changes below round-off; fall back to gradient decrease.
            if (p.v_gradient(dual_eval(p, trial).w).lpNorm<Eigen::Infinity>() < 0.5 * gnorm) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (gnorm <= opt.tolerance * 1e-2) break;
            throw SolverError("dual Newton line search failed with gradient norm " + format_double(gnorm));
        }
        v = trial;
        if (v.lpNorm<Eigen::Infinity>() > divergence_limit) {
            const int s = largest_entry(v);
            throw InfeasibleError(s, "flow at state " + std::to_string(s) +
                                         " cannot be met under the support/cap constraints");
        }
    }
    return {v, it};
}

// Projected extragradient on (v, w) in the metric diag(1/sigma, dD/tau).
std::pair<std::pair<Vector, Vector>, long> solve_extragradient(const Problem& p, const TabularMdp& mdp,
                                                                const Occupancy& dD, const OracleOptions& opt,
                                                                double upper) {
    const int S = p.num_states();
    const auto n = static_cast<Eigen::Index>(p.cells().size());
    Vector base(n);
    for (Eigen::Index i = 0; i < n; ++i) base(i) = p.cells()[static_cast<std::size_t>(i)].base;
    const double alpha = p.alpha();
    const Regularizer& reg = p.reg();

    auto w_field = [&](const Vector& v, const Vector& w) {
        const Vector e = p.residuals(v);
        Vector g(n);
        for (Eigen::Index i = 0; i < n; ++i) g(i) = e(i) - alpha * reg.deriv(w(i));
        return g;  // dL/dw per unit of data mass
    };
    auto project = [&](Vector w) { return w.cwiseMax(0.0).cwiseMin(upper).eval(); };

    Vector v = Vector::Zero(S);
    Vector w = Vector::Constant(n, std::min(1.0, upper));
    double eta = 1.0;
    const double rho = 1.0;
    const double nu = 0.9;
    long it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (it % 20 == 0) {
            const double res = kkt_residual(mdp, dD, reg, alpha, v, p.to_matrix(w), opt.cap);
            if (res < opt.tolerance) break;
        }
        const Vector gv = p.v_gradient(w);
        const Vector gw = w_field(v, w);
        Vector vb, wb, gvb, gwb;
        for (int k = 0; k < 60; ++k) {
            const double sigma = eta * rho;
            const double tau = eta / rho;
            vb = v - sigma * gv;
            wb = project(w + tau * gw);
            gvb = p.v_gradient(wb);
            gwb = w_field(vb, wb);
            const double lhs = sigma * (gvb - gv).squaredNorm() + tau * base.dot((gwb - gw).cwiseAbs2());
            const double rhs = nu * nu * ((vb - v).squaredNorm() / sigma + base.dot((wb - w).cwiseAbs2()) / tau);
            if (lhs <= rhs) break;
            eta *= 0.5;
        }
        v -= eta * rho * gvb;
        w = project(w + (eta / rho) * gwb);
        eta = std::min(eta * 1.05, 1e6);
    }
    if (it >= opt.max_iterations)
        throw SolverError("extragradient did not reach the KKT tolerance within the iteration budget");
    return {{v, w}, it};
}

}  // namespace

Matrix kkt_weights(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
                   const Vector& v, std::optional<double> cap) {
    const double upper = cap ? *cap : std::numeric_limits<double>::infinity();
    const Matrix e = q_backup(mdp, v).colwise() - v;
    Matrix w = Matrix::Zero(mdp.num_states(), mdp.num_actions());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (dD.mass(s, a) > 0.0) w(s, a) = std::clamp(reg.deriv_inverse(e(s, a) / alpha), 0.0, upper);
    return w;
}

double kkt_residual(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
                    const Vector& v, const Matrix& w, std::optional<double> cap) {
    const Matrix target = kkt_weights(mdp, dD, reg, alpha, v, cap);
    double stationarity = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (dD.mass(s, a) > 0.0) stationarity = std::max(stationarity, std::abs(w(s, a) - target(s, a)));
    const double flow = flow_residual_vector(mdp, w.cwiseProduct(dD.mass)).cwiseAbs().maxCoeff();
    return std::max(stationarity, flow);
}

RegularizedSolution solve_regularized(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                      double alpha, const OracleOptions& options) {
    if (!(alpha > 0.0)) throw InvalidArgument("solve_regularized: alpha must be positive");
    if (dD.mass.rows() != mdp.num_states() || dD.mass.cols() != mdp.num_actions())
        throw InvalidArgument("solve_regularized: dD shape mismatch");
    if (options.cap && !(*options.cap > 0.0)) throw InvalidArgument("solve_regularized: cap must be positive");
    Problem problem(mdp, dD, reg, alpha, options.cap);
    problem.check_coverage();

    RegularizedSolution out;
    out.alpha = alpha;
    out.cap = options.cap;
    out.path = options.path;
    if (options.path == SolverPath::dual_newton) {
        auto [v, iterations] = solve_dual_newton(problem, mdp, options);
        out.v_star = std::move(v);
        out.w_star = kkt_weights(mdp, dD, reg, alpha, out.v_star, options.cap);
        out.iterations = iterations;
    } else {
        double min_base = std::numeric_limits<double>::infinity();
        for (const auto& c : problem.cells()) min_base = std::min(min_base, c.base);
        const double upper = options.cap ? *options.cap : 10.0 / min_base;
        auto [vw, iterations] = solve_extragradient(problem, mdp, dD, options, upper);
        out.v_star = std::move(vw.first);
        out.w_star = problem.to_matrix(vw.second);
        out.iterations = iterations;
        if (!options.cap && out.w_star.maxCoeff() >= upper * (1.0 - 1e-12))
            throw SolverError("extragradient: numerical box on w is active at the solution");
    }
    out.kkt_residual = kkt_residual(mdp, dD, reg, alpha, out.v_star, out.w_star, options.cap);
    if (!(out.kkt_residual < 1e-8))
        throw SolverError("oracle KKT residual " + std::to_string(out.kkt_residual) + " above 1e-8");
    out.d_star = Occupancy(out.w_star.cwiseProduct(dD.mass));
    out.pi_star = policy_from_occupancy(out.d_star.mass);
    const Vector marg = out.d_star.marginal();
    for (int s = 0; s < mdp.num_states(); ++s)
        if (marg(s) <= kCoverTol) out.nonunique_states.push_back(s);
    return out;
}

UnregularizedSolution solve_unregularized(const TabularMdp& mdp) {
    OptimalValues opt = optimal_values(mdp, 1e-12);
    Occupancy d = exact_occupancy(mdp, opt.policy);
    return {std::move(opt.v), std::move(opt.policy), std::move(d)};
}

Concentrability concentrability(const Occupancy& d_target, const Occupancy& dD) {
    Concentrability out;
    for (Eigen::Index s = 0; s < dD.mass.rows(); ++s) {
        for (Eigen::Index a = 0; a < dD.mass.cols(); ++a) {
            if (dD.mass(s, a) > 0.0)
                out.b_w = std::max(out.b_w, d_target.mass(s, a) / dD.mass(s, a));
            else if (d_target.mass(s, a) > kCoverTol)
                out.feasible = false;
        }
    }
    if (!out.feasible) out.b_w = std::numeric_limits<double>::infinity();
    return out;
}

StrongConcentrability strong_concentrability_check(const TabularMdp& mdp, const Occupancy& dD, const Occupancy& d0,
                                                   const StrongConcentrabilityOptions& options) {
    const int S = mdp.num_states();
    const int A = mdp.num_actions();
    const Vector data_state = dD.marginal();
    const Vector target_state = d0.marginal();
    StrongConcentrability out;
    if ((data_state.array() <= 0.0).any()) {
        out.b_wu = std::numeric_limits<double>::infinity();
        out.b_wl = 0.0;
        return out;
    }
    out.b_wl = target_state.cwiseQuotient(data_state).minCoeff();

    auto visit = [&](const std::vector<int>& actions) {
        const Vector d = exact_occupancy(mdp, Policy::deterministic(actions, A)).marginal();
        out.b_wu = std::max(out.b_wu, d.cwiseQuotient(data_state).maxCoeff());
        ++out.policies_checked;
    };

    const double count = std::pow(static_cast<double>(A), S);
    std::vector<int> actions(static_cast<std::size_t>(S), 0);
    if (count <= options.max_enumeration) {
        while (true) {
            visit(actions);
            int k = 0;
            while (k < S && ++actions[static_cast<std::size_t>(k)] == A) actions[static_cast<std::size_t>(k++)] = 0;
            if (k == S) break;
        }
    } else {
        if (!options.allow_sampling)
            throw InvalidArgument("strong_concentrability_check: enumeration budget exceeded and sampling not allowed");
        out.sampled = true;
        Rng rng(options.seed);
        for (std::size_t i = 0; i < options.sample_count; ++i) {
            for (auto& a : actions) a = static_cast<int>(rng.index(static_cast<std::uint64_t>(A)));
            visit(actions);
        }
    }
    out.holds = std::isfinite(out.b_wu) && out.b_wl > 0.0;
    return out;
}

StabilityReport lp_stability_sweep(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                   const std::vector<double>& alphas, double tolerance) {
    if (alphas.empty()) throw InvalidArgument("lp_stability_sweep: empty alpha grid");
    const Vector v0 = solve_unregularized(mdp).v;
    const Vector data_state = dD.marginal();
    StabilityReport report;
    for (double alpha : alphas) {
        RegularizedSolution sol = solve_regularized(mdp, dD, reg, alpha);
        const Vector diff = sol.v_star - v0;
        report.rows.push_back({alpha, sol.w_star, std::sqrt(data_state.dot(diff.cwiseAbs2()))});
    }
    const Matrix& last = report.rows.back().w_star;
    std::size_t run = 0;
    for (auto it = report.rows.rbegin(); it != report.rows.rend(); ++it) {
        if ((it->w_star - last).cwiseAbs().maxCoeff() > tolerance) break;
        ++run;
    }
    report.constant_prefix = run;

    double sxy = 0.0, sxx = 0.0, mean = 0.0;
    const std::size_t first = report.rows.size() - run;
    for (std::size_t i = first; i < report.rows.size(); ++i) {
        sxy += report.rows[i].alpha * report.rows[i].v_gap;
        sxx += report.rows[i].alpha * report.rows[i].alpha;
        mean += report.rows[i].v_gap;
    }
    mean /= static_cast<double>(run);
    report.slope = sxy / sxx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = first; i < report.rows.size(); ++i) {
        const double fit = report.slope * report.rows[i].alpha;
        ss_res += (report.rows[i].v_gap - fit) * (report.rows[i].v_gap - fit);
        ss_tot += (report.rows[i].v_gap - mean) * (report.rows[i].v_gap - mean);
    }
    report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return report;
}

}  // namespace prorl
