#include "prorl/suites.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "prorl/counterexample.hpp"
#include "prorl/error.hpp"
#include "prorl/extraction.hpp"
#include "prorl/generators.hpp"
#include "prorl/io.hpp"
#include "prorl/objective.hpp"
#include "prorl/rng.hpp"
#include "prorl/svg.hpp"

namespace prorl {

namespace {

using io::format_number;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string tag(const std::string& text) { return fnv1a_hex(text); }

Artifact runs_artifact(const std::string& name, const std::string& hash, const std::vector<RunReport>& runs) {
    io::CsvTable table(report_header());
    for (const RunReport& r : runs) table.add_row(report_row(hash, r));
    return {name, table.to_string()};
}

Artifact summary_artifact(const std::string& name, const std::vector<std::pair<std::string, double>>& summary) {
    io::CsvTable table({"key", "value"});
    for (const auto& [key, value] : summary) table.add_row({key, format_number(value)});
    return {name, table.to_string()};
}

// Least-squares fit, or all-NaN when a value is not positive.
LineFit safe_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    for (double v : y)
        if (!(v > 0.0)) return {kNan, kNan, kNan, kNan, kNan, kNan};
    return fit_loglog(x, y);
}

Series fit_series(const std::vector<double>& x, const LineFit& fit) {
    Series s{"fit slope " + format_number(std::round(fit.slope * 1000.0) / 1000.0), {}, {}};
    if (!std::isfinite(fit.slope)) return s;
    for (double v : x) {
        s.x.push_back(v);
        s.y.push_back(std::pow(10.0, fit.intercept + fit.slope * std::log10(v)));
    }
    return s;
}

Artifact loglog_plot(const std::string& name, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& label, const LineFit& fit) {
    ChartOptions chart;
    chart.title = title + " (slope " + format_number(std::round(fit.slope * 1000.0) / 1000.0) + ", 95% CI [" +
                  format_number(std::round(fit.ci_low * 1000.0) / 1000.0) + ", " +
                  format_number(std::round(fit.ci_high * 1000.0) / 1000.0) + "])";
    chart.x_label = x_label;
    chart.y_label = y_label;
    chart.log_x = chart.log_y = true;
    return {name, render_line_chart({Series{label, x, y}, fit_series(x, fit)}, chart)};
}

std::vector<double> as_doubles(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

void add_fit(std::vector<std::pair<std::string, double>>& summary, const std::string& prefix, const LineFit& fit) {
    summary.emplace_back(prefix + "_slope", fit.slope);
    summary.emplace_back(prefix + "_slope_ci_low", fit.ci_low);
    summary.emplace_back(prefix + "_slope_ci_high", fit.ci_high);
    summary.emplace_back(prefix + "_r_squared", fit.r_squared);
}

double expected_l1(const Occupancy& d, const Policy& a, const Policy& b) {
    return d.marginal().dot((a.probs - b.probs).cwiseAbs().rowwise().sum());
}

Instance rate_instance(const RateOptions& o) {
    TabularMdp mdp = build_mdp(o.mdp);
    Occupancy dD = build_data_distribution(mdp, o.mdp, o.data);
    return make_instance(std::move(mdp), std::move(dD), Regularizer::quadratic(1.0), o.alpha);
}

std::string rate_tag(const RateOptions& o) {
    ExperimentConfig c;
    c.mdp = o.mdp;
    c.data = o.data;
    c.alpha = o.alpha;
    c.classes = o.classes;
    c.delta = o.delta;
    return config_hash(c);
}

}  // namespace

// ---------------------------------------------------------------- counterexample

CounterexampleResult run_counterexample(const CounterexampleOptions& o) {
    using namespace counterexample;
    CounterexampleResult result;
    const Regularizer reg = Regularizer::quadratic(1.0);
    io::CsvTable table({"instance", "tie_gap", "regret", "r_policy_regret", "mass_a_r"});
    io::CsvTable success({"instance", "n", "runs", "successes"});

    for (int which : {1, 2}) {
        const CounterexampleBundle b = build_counterexample(o.gamma, which);
        CounterexampleInstance ci;
        ci.instance = which;
        ci.tie_gap = std::abs(population_lagrangian(b.mdp, b.data, reg, 0.0, b.v0, b.w1) -
                              population_lagrangian(b.mdp, b.data, reg, 0.0, b.v0, b.w2));

        // Infinite data, adversarial order: w2 is listed first and wins the tie.
        const ValueClass v0_class = make_value_class({b.v0}, b.v0.lpNorm<Eigen::Infinity>(), false, BoundAction::reject);
        const WeightClass tie_class =
            make_weight_class({b.w2, b.w1}, std::max(b.w1.maxCoeff(), b.w2.maxCoeff()), std::nullopt, BoundAction::reject);
        const SaddleSolution tie_solution =
            solve_exact(population_payoffs(b.mdp, b.data, v0_class, tie_class, reg, 0.0), v0_class, tie_class);
        const Policy pi_hat = extract_policy(tie_solution.w_hat, b.behavior).policy;
        const double j_opt = policy_return(b.mdp, solve_unregularized(b.mdp).pi);
        ci.regret = j_opt - policy_return(b.mdp, pi_hat);
        Policy r_policy = Policy::uniform(4, 2);
        r_policy.probs.row(A) << 0.0, 1.0;
        ci.r_policy_regret = j_opt - policy_return(b.mdp, r_policy);

        const Instance inst = make_instance(b.mdp, b.data, reg, o.alpha);
        ci.mass_a_r = inst.d_star.mass(A, R);
        const double v_bound = std::max(inst.v_star.lpNorm<Eigen::Infinity>(), b.v0.lpNorm<Eigen::Infinity>());
        const double w_bound = std::max({b.w1.maxCoeff(), b.w2.maxCoeff(), inst.w_star.maxCoeff()});
        FunctionClasses classes{make_value_class({inst.v_star, b.v0}, v_bound, false, BoundAction::reject),
                                make_weight_class({b.w2, b.w1, inst.w_star}, w_bound, std::nullopt, BoundAction::reject)};
        for (std::size_t n : o.n_grid) {
            std::size_t wins = 0;
            for (int k = 0; k < o.seeds; ++k) {
                const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
                const OfflineDataset data = generate_dataset(b.mdp, b.data, n, n, dataset_seed(mix_seed(seed, which)));
                PipelineOptions po;
                RunReport r = run_pipeline(inst, classes, data, po);
                r.seed = seed;
                if (r.pi_hat.probs(A, L) > 0.999) ++wins;
                result.runs.push_back(std::move(r));
            }
            ci.successes.push_back(wins);
            success.add_row({std::to_string(which), std::to_string(n), std::to_string(o.seeds), std::to_string(wins)});
        }
        table.add_row({std::to_string(which), format_number(ci.tie_gap), format_number(ci.regret),
                       format_number(ci.r_policy_regret), format_number(ci.mass_a_r)});
        result.instances.push_back(std::move(ci));
    }

    const auto& ins = result.instances;
    result.worst_instance = ins[1].regret > ins[0].regret ? 2 : 1;
    result.worst_regret = std::max(ins[0].regret, ins[1].regret);
    result.average_regret = 0.5 * (ins[0].regret + ins[1].regret);

    auto& out = result.output;
    out.summary = {{"tie_gap_max", std::max(ins[0].tie_gap, ins[1].tie_gap)},
                   {"worst_instance", result.worst_instance},
                   {"worst_regret", result.worst_regret},
                   {"average_regret", result.average_regret},
                   {"r_policy_regret_worst", ins[static_cast<std::size_t>(result.worst_instance - 1)].r_policy_regret},
                   {"mass_a_r_max", std::max(ins[0].mass_a_r, ins[1].mass_a_r)}};
    std::ostringstream desc;
    desc << "counterexample;gamma=" << o.gamma << ";alpha=" << o.alpha;
    out.artifacts.push_back({"counterexample.csv", table.to_string()});
    out.artifacts.push_back({"counterexample_success.csv", success.to_string()});
    out.artifacts.push_back(runs_artifact("counterexample_runs.csv", tag(desc.str()), result.runs));
    out.artifacts.push_back(summary_artifact("counterexample_summary.csv", out.summary));
    return result;
}

// ---------------------------------------------------------------- rate_regularized

RateResult run_rate_regularized(const RateOptions& o) {
    RateResult result;
    const Instance inst = rate_instance(o);
    const FunctionClasses classes = build_classes(inst, o.classes);
    for (std::size_t n : o.n_grid) {
        std::vector<double> errors, gaps;
        for (int k = 0; k < o.seeds; ++k) {
            const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
            const OfflineDataset data = generate_dataset(inst.mdp, inst.dD, n, n, dataset_seed(seed));
            PipelineOptions po;
            po.delta = o.delta;
            RunReport r = run_pipeline(inst, classes, data, po);
            r.seed = seed;
            errors.push_back(r.w_error);
            gaps.push_back(r.realized_gap);
            result.runs.push_back(std::move(r));
        }
        result.n.push_back(static_cast<double>(n));
        result.median_w_error.push_back(median(errors));
        result.median_gap.push_back(median(gaps));
    }
    result.fit = safe_loglog(result.n, result.median_w_error);
    result.monotone = true;
    for (std::size_t i = 1; i < result.median_w_error.size(); ++i)
        if (result.median_w_error[i] > result.median_w_error[i - 1]) result.monotone = false;

    auto& out = result.output;
    add_fit(out.summary, "w_error", result.fit);
    out.summary.emplace_back("monotone", result.monotone ? 1.0 : 0.0);
    io::CsvTable medians({"n", "median_w_error", "median_realized_gap"});
    for (std::size_t i = 0; i < result.n.size(); ++i)
        medians.add_row({format_number(result.n[i]), format_number(result.median_w_error[i]),
                         format_number(result.median_gap[i])});
    out.artifacts.push_back(runs_artifact("rate_regularized_runs.csv", rate_tag(o), result.runs));
    out.artifacts.push_back({"rate_regularized_medians.csv", medians.to_string()});
    out.artifacts.push_back(summary_artifact("rate_regularized_summary.csv", out.summary));
    out.artifacts.push_back(loglog_plot("rate_regularized.svg", "median ||w_hat - w*||_{2,dD} vs n", "n",
                                        "median weight error", result.n, result.median_w_error, "median", result.fit));
    return result;
}

CoverageResult run_coverage(const CoverageOptions& o) {
    CoverageResult result;
    const Instance inst = rate_instance(o.setup);
    const FunctionClasses classes = build_classes(inst, o.setup.classes);
    result.datasets = o.datasets;
    result.threshold = binomial_quantile(o.datasets, o.setup.delta, o.level);
    for (std::size_t k = 0; k < o.datasets; ++k) {
        const std::uint64_t seed = o.base_seed + k;
        const OfflineDataset data = generate_dataset(inst.mdp, inst.dD, o.n, o.n0, dataset_seed(seed));
        PipelineOptions po;
        po.delta = o.setup.delta;
        RunReport r = run_pipeline(inst, classes, data, po);
        r.seed = seed;
        result.eps_stat = r.bounds.eps_stat;
        result.worst_deviation = std::max(result.worst_deviation, r.max_deviation);
        if (r.max_deviation > r.bounds.eps_stat) ++result.violations;
        result.runs.push_back(std::move(r));
    }
    auto& out = result.output;
    out.summary = {{"datasets", static_cast<double>(result.datasets)},
                   {"violations", static_cast<double>(result.violations)},
                   {"threshold", static_cast<double>(result.threshold)},
                   {"eps_stat", result.eps_stat},
                   {"worst_deviation", result.worst_deviation}};
    out.artifacts.push_back(runs_artifact("coverage_runs.csv", rate_tag(o.setup), result.runs));
    out.artifacts.push_back(summary_artifact("coverage_summary.csv", out.summary));
    return result;
}

// ---------------------------------------------------------------- rate_unregularized

UnregularizedRateResult run_rate_unregularized(const UnregularizedRateOptions& o) {
    UnregularizedRateResult result;
    const Regularizer reg = Regularizer::quadratic(1.0);
    const TabularMdp mdp = build_mdp(o.mdp);
    const Occupancy dD = build_data_distribution(mdp, o.mdp, o.data);
    const Instance base = make_instance(mdp, dD, reg, 0.0);
    const double b_f0 = reg.bounds(base.w_star.maxCoeff()).b_f;
    for (std::size_t n : o.n_grid) {
        const double eps = o.eps_scale * std::pow(static_cast<double>(n), -1.0 / 6.0);
        const double alpha = recommended_alpha(AlphaTarget::unregularized, eps, b_f0);
        const Instance inst = make_instance(mdp, dD, reg, alpha);
        const FunctionClasses classes = build_classes(inst, o.classes);
        std::vector<double> gaps;
        for (int k = 0; k < o.seeds; ++k) {
            const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
            const OfflineDataset data = generate_dataset(mdp, dD, n, n, dataset_seed(seed));
            PipelineOptions po;
            po.delta = o.delta;
            RunReport r = run_pipeline(inst, classes, data, po);
            r.seed = seed;
            gaps.push_back(r.gap_to_optimal);
            result.runs.push_back(std::move(r));
        }
        result.n.push_back(static_cast<double>(n));
        result.alpha.push_back(alpha);
        result.median_gap.push_back(median(gaps));
    }
    result.fit = safe_loglog(result.n, result.median_gap);
    auto& out = result.output;
    add_fit(out.summary, "gap_to_optimal", result.fit);
    io::CsvTable medians({"n", "alpha", "median_gap_to_optimal"});
    for (std::size_t i = 0; i < result.n.size(); ++i)
        medians.add_row({format_number(result.n[i]), format_number(result.alpha[i]), format_number(result.median_gap[i])});
    ExperimentConfig c;
    c.mdp = o.mdp;
    c.data = o.data;
    c.classes = o.classes;
    c.alpha = 0.0;
    out.artifacts.push_back(runs_artifact("rate_unregularized_runs.csv", config_hash(c), result.runs));
    out.artifacts.push_back({"rate_unregularized_medians.csv", medians.to_string()});
    out.artifacts.push_back(summary_artifact("rate_unregularized_summary.csv", out.summary));
    out.artifacts.push_back(loglog_plot("rate_unregularized.svg", "median J(pi*_0) - J(pi_hat) vs n", "n",
                                        "median regret", result.n, result.median_gap, "median", result.fit));
    return result;
}

// ---------------------------------------------------------------- lp_stability

StabilityResult run_lp_stability(const StabilityOptions& o) {
    StabilityResult result;
    const TabularMdp mdp = tied_optimum_mdp(o.gamma);
    const Occupancy dD = behavior_occupancy(mdp, Policy::uniform(mdp.num_states(), mdp.num_actions()));
    const Regularizer reg = Regularizer::quadratic(1.0);
    result.report = lp_stability_sweep(mdp, dD, reg, o.alphas, o.tolerance);

    // The optimal occupancies form the segment between the two deterministic
    // optimal policies that differ at the tied state; f is minimized on it in closed form.
    const OptimalValues opt = optimal_values(mdp);
    const Matrix q = q_backup(mdp, opt.v);
    int tied = -1;
    for (int s = 0; s < mdp.num_states(); ++s) {
        int count = 0;
        for (int a = 0; a < mdp.num_actions(); ++a)
            if (q(s, a) >= q.row(s).maxCoeff() - 1e-9) ++count;
        if (count > 1) {
            if (tied >= 0 || count != 2) throw SolverError("lp_stability: expected one state with two tied actions");
            tied = s;
        }
    }
    if (tied < 0) throw SolverError("lp_stability: the optimal policy is unique");
    Matrix p0 = opt.policy.probs, p1 = opt.policy.probs;
    std::vector<int> best;
    for (int a = 0; a < mdp.num_actions(); ++a)
        if (q(tied, a) >= q.row(tied).maxCoeff() - 1e-9) best.push_back(a);
    p0.row(tied).setZero();
    p1.row(tied).setZero();
    p0(tied, best[0]) = 1.0;
    p1(tied, best[1]) = 1.0;
    const Matrix d0 = exact_occupancy(mdp, Policy(p0)).mass;
    const Matrix delta = exact_occupancy(mdp, Policy(p1)).mass - d0;
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < d0.size(); ++i) {
        num += delta(i) * reg.deriv(d0(i) / dD.mass(i));
        den += delta(i) * delta(i) / dD.mass(i);
    }
    result.t_star = std::clamp(-num / (reg.strong_convexity() * den), 0.0, 1.0);
    result.w_min_f = (d0 + result.t_star * delta).cwiseQuotient(dD.mass);
    result.limit_error = (result.report.rows.back().w_star - result.w_min_f).cwiseAbs().maxCoeff();

    auto& out = result.output;
    out.summary = {{"constant_prefix", static_cast<double>(result.report.constant_prefix)},
                   {"slope", result.report.slope},
                   {"r_squared", result.report.r_squared},
                   {"t_star", result.t_star},
                   {"limit_error", result.limit_error}};
    io::CsvTable rows({"alpha", "v_gap", "w_change_to_smallest_alpha"});
    std::vector<double> alphas, gaps;
    for (const StabilityRow& r : result.report.rows) {
        const double change = (r.w_star - result.report.rows.back().w_star).cwiseAbs().maxCoeff();
        rows.add_row({format_number(r.alpha), format_number(r.v_gap), format_number(change)});
        alphas.push_back(r.alpha);
        gaps.push_back(r.v_gap);
    }
    out.artifacts.push_back({"lp_stability.csv", rows.to_string()});
    out.artifacts.push_back(summary_artifact("lp_stability_summary.csv", out.summary));
    ChartOptions chart;
    chart.title = "||v*_alpha - v*_0||_{2,dD} vs alpha";
    chart.x_label = "alpha";
    chart.y_label = "value gap";
    Series line{"slope " + format_number(result.report.slope) + " x alpha", {0.0}, {0.0}};
    for (double a : alphas) {
        line.x.push_back(a);
        line.y.push_back(result.report.slope * a);
    }
    out.artifacts.push_back({"lp_stability.svg", render_line_chart({Series{"value gap", alphas, gaps}, line}, chart)});
    return result;
}

// ---------------------------------------------------------------- constrained_coverage

ConstrainedResult run_constrained(const ConstrainedOptions& o) {
    ConstrainedResult result;
    const Regularizer reg = Regularizer::quadratic(1.0);
    const int S = o.num_states, A = o.num_actions;
    const TabularMdp mdp = random_mdp(S, A, o.gamma, o.mdp_seed);
    const UnregularizedSolution opt = solve_unregularized(mdp);

    // The behavior policy never takes the optimal action.
    Matrix probs = Matrix::Zero(S, A);
    for (int s = 0; s < S; ++s) {
        int best = 0;
        opt.pi.probs.row(s).maxCoeff(&best);
        const Vector p = random_distribution(A - 1, mix_seed(o.behavior_seed, static_cast<std::uint64_t>(s)), 0.2);
        for (int a = 0, k = 0; a < A; ++a)
            if (a != best) probs(s, a) = p(k++);
    }
    const Occupancy dD = behavior_occupancy(mdp, Policy(probs));
    result.optimal_covered = concentrability(opt.d, dD).feasible;
    result.j_star_0 = policy_return(mdp, opt.pi);

    const Instance inst = make_instance(mdp, dD, reg, o.alpha, o.cap);
    OracleOptions small_options;
    small_options.cap = o.cap;
    const RegularizedSolution small = solve_regularized(mdp, dD, reg, o.alpha_small, small_options);
    const double b_f = reg.bounds(o.cap).b_f;
    result.j_capped_upper = policy_return(mdp, small.pi_star) + 2.0 * o.alpha_small * b_f;
    result.j_capped_alpha = inst.j_star_alpha;

    ClassSpec spec{"realizable", o.distractors, {DistractorMode::multiscale, 0.5, 1e-3}, 0.0, o.class_seed};
    const FunctionClasses classes = build_classes(inst, spec);
    for (std::size_t n : o.n_grid) {
        for (int k = 0; k < o.seeds; ++k) {
            const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
            const OfflineDataset data = generate_dataset(mdp, dD, n, n, dataset_seed(seed));
            PipelineOptions po;
            po.delta = o.delta;
            RunReport r = run_pipeline(inst, classes, data, po);
            r.seed = seed;
            ConstrainedRow row{n, seed, r.j_hat, result.j_capped_upper - r.j_hat, 2.0 * o.alpha * b_f + r.rhs_realized,
                               r.saddle.w_hat.maxCoeff()};
            if (row.gap <= row.rhs) ++result.within_bound;
            if (row.w_hat_max <= o.cap) ++result.within_cap;
            result.rows.push_back(row);
            result.runs.push_back(std::move(r));
        }
    }

    auto& out = result.output;
    out.summary = {{"optimal_covered", result.optimal_covered ? 1.0 : 0.0},
                   {"j_star_0", result.j_star_0},
                   {"j_capped_upper", result.j_capped_upper},
                   {"j_capped_alpha", result.j_capped_alpha},
                   {"runs", static_cast<double>(result.rows.size())},
                   {"within_bound", static_cast<double>(result.within_bound)},
                   {"within_cap", static_cast<double>(result.within_cap)}};
    io::CsvTable rows({"n", "seed", "j_hat", "capped_gap_upper", "rhs", "w_hat_max"});
    for (const ConstrainedRow& r : result.rows)
        rows.add_row({std::to_string(r.n), std::to_string(r.seed), format_number(r.j_hat), format_number(r.gap),
                      format_number(r.rhs), format_number(r.w_hat_max)});
    std::ostringstream desc;
    desc << "constrained;S=" << S << ";A=" << A << ";gamma=" << o.gamma << ";seed=" << o.mdp_seed << ";alpha=" << o.alpha
         << ";cap=" << o.cap;
    out.artifacts.push_back({"constrained.csv", rows.to_string()});
    out.artifacts.push_back(runs_artifact("constrained_runs.csv", tag(desc.str()), result.runs));
    out.artifacts.push_back(summary_artifact("constrained_summary.csv", out.summary));
    return result;
}

// ---------------------------------------------------------------- alpha_zero_strong

AlphaZeroResult run_alpha_zero(const AlphaZeroOptions& o) {
    AlphaZeroResult result;
    const int S = o.num_states, A = o.num_actions;
    const int count = S * (A - 1);
    // Gaps are geometric and dealt round-robin over states, so every state has a spread of gaps.
    std::vector<double> gaps(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double t = count > 1 ? static_cast<double>(k) / (count - 1) : 0.0;
        gaps[static_cast<std::size_t>((k % S) * (A - 1) + k / S)] = o.gap_max * std::pow(o.gap_min / o.gap_max, t);
    }
    const TabularMdp mdp = graded_gap_mdp(S, A, gaps, o.gamma, o.mixing, o.mdp_seed);
    const Occupancy dD = behavior_occupancy(mdp, Policy::uniform(S, A));
    const Instance inst = make_instance(mdp, dD, Regularizer::quadratic(1.0), 0.0);
    result.strong = *inst.strong;
    if (!result.strong.holds) throw SolverError("alpha_zero: strong concentrability fails on the constructed MDP");

    // W: occupancy ratios of every deterministic policy, the optimal one first. V = {v*_0}.
    std::vector<Matrix> weights{inst.w_star};
    std::vector<int> actions(static_cast<std::size_t>(S), 0);
    while (true) {
        int k = 0;
        while (k < S && ++actions[static_cast<std::size_t>(k)] == A) actions[static_cast<std::size_t>(k++)] = 0;
        if (k == S) break;
        weights.push_back(exact_occupancy(mdp, Policy::deterministic(actions, A)).mass.cwiseQuotient(dD.mass));
    }
    double b_w = 0.0, b_wl = std::numeric_limits<double>::infinity();
    for (const Matrix& w : weights) {
        b_w = std::max(b_w, w.maxCoeff());
        b_wl = std::min(b_wl, w.cwiseProduct(inst.behavior.probs).rowwise().sum().minCoeff());
    }
    FunctionClasses classes{make_value_class({inst.v_star}, 1.0 / (1.0 - o.gamma), true, BoundAction::reject),
                            make_weight_class(weights, b_w, WeightFloor{b_wl, inst.behavior}, BoundAction::reject)};
    if (classes.values.members.size() != 1 || classes.weights.members.size() != weights.size())
        throw SolverError("alpha_zero: class members violate the declared box or floor");

    for (std::size_t n : o.n_grid) {
        double total = 0.0;
        for (int k = 0; k < o.seeds; ++k) {
            const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
            const OfflineDataset data = generate_dataset(mdp, dD, n, n, dataset_seed(seed));
            PipelineOptions po;
            po.delta = o.delta;
            RunReport r = run_pipeline(inst, classes, data, po);
            r.seed = seed;
            total += r.gap_to_optimal;
            if (r.gap_to_optimal <= r.rhs_alpha_zero) ++result.within_bound;
            result.runs.push_back(std::move(r));
        }
        result.n.push_back(static_cast<double>(n));
        result.mean_gap.push_back(total / o.seeds);
    }
    result.fit = safe_loglog(result.n, result.mean_gap);

    auto& out = result.output;
    out.summary = {{"b_wu", result.strong.b_wu},
                   {"b_wl", result.strong.b_wl},
                   {"class_floor", b_wl},
                   {"w_size", static_cast<double>(weights.size())},
                   {"within_bound", static_cast<double>(result.within_bound)}};
    add_fit(out.summary, "mean_regret", result.fit);
    io::CsvTable means({"n", "mean_regret"});
    for (std::size_t i = 0; i < result.n.size(); ++i)
        means.add_row({format_number(result.n[i]), format_number(result.mean_gap[i])});
    std::ostringstream desc;
    desc << "alpha_zero;S=" << S << ";A=" << A << ";gamma=" << o.gamma << ";gaps=" << o.gap_max << "-" << o.gap_min
         << ";mixing=" << o.mixing << ";seed=" << o.mdp_seed;
    out.artifacts.push_back(runs_artifact("alpha_zero_runs.csv", tag(desc.str()), result.runs));
    out.artifacts.push_back({"alpha_zero_means.csv", means.to_string()});
    out.artifacts.push_back(summary_artifact("alpha_zero_summary.csv", out.summary));
    out.artifacts.push_back(loglog_plot("alpha_zero.svg", "mean J(pi*_0) - J(pi_hat) vs n, alpha = 0", "n",
                                        "mean regret", result.n, result.mean_gap, "mean", result.fit));
    return result;
}

// ---------------------------------------------------------------- bc_scaling

BcScalingResult run_bc_scaling(const BcScalingOptions& o) {
    BcScalingResult result;
    const Instance inst = rate_instance(o.setup);
    const FunctionClasses classes = build_classes(inst, o.setup.classes);
    BcSpec spec;
    spec.policy_distractors = o.policy_distractors;
    spec.seed = o.policy_seed;
    const PolicyClass policies = build_policy_class(inst, spec);
    const std::vector<Matrix> witnesses = witness_class(policies);

    struct Weights {
        Matrix w_hat;
        double l1_hat;
        double b_w;
    };
    std::vector<Weights> per_seed;
    for (int k = 0; k < o.seeds; ++k) {
        const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
        const OfflineDataset d1 = generate_dataset(inst.mdp, inst.dD, o.n1, o.n1, dataset_seed(seed));
        PipelineOptions po;
        po.delta = o.delta;
        const RunReport r = run_pipeline(inst, classes, d1, po);
        per_seed.push_back({r.saddle.w_hat, r.policy_l1, r.bounds.b_w});
    }

    for (std::size_t n2 : o.n2_grid) {
        std::vector<double> deviations;
        std::size_t passes = 0;
        for (int k = 0; k < o.seeds; ++k) {
            const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
            const Weights& w = per_seed[static_cast<std::size_t>(k)];
            const OfflineDataset d2 =
                generate_dataset(inst.mdp, inst.dD, n2, 0, mix_seed(dataset_seed(seed), static_cast<std::uint64_t>(n2)));
            const CloneResult clone = clone_policy(w.w_hat, d2, policies, witnesses);

            Matrix counts = Matrix::Zero(w.w_hat.rows(), w.w_hat.cols());
            for (const Transition& t : d2.transitions) counts(t.s, t.a) += w.w_hat(t.s, t.a);
            counts /= static_cast<double>(n2);
            const Matrix population = inst.dD.mass.cwiseProduct(w.w_hat);
            double deviation = 0.0;
            for (const Policy& p : policies.members)
                deviation = std::max(deviation, std::abs(clone_objective(counts, p, witnesses) -
                                                         clone_objective(population, p, witnesses)));

            BcRow row;
            row.n2 = n2;
            row.seed = seed;
            row.l1_hat = w.l1_hat;
            row.l1_bar = expected_l1(inst.d_star, inst.pi_star, clone.policy);
            row.cloning_term = cloning_term(w.b_w, n2, policies.members.size(), o.delta);
            row.deviation = deviation;
            row.paired_ok = row.l1_bar <= row.l1_hat + o.slack * row.cloning_term;
            if (row.paired_ok) ++passes;
            deviations.push_back(deviation);
            result.rows.push_back(row);
        }
        result.n2.push_back(static_cast<double>(n2));
        result.median_deviation.push_back(median(deviations));
        result.paired_passes.push_back(passes);
    }
    result.fit = safe_loglog(result.n2, result.median_deviation);

    auto& out = result.output;
    add_fit(out.summary, "deviation", result.fit);
    std::size_t worst = result.paired_passes.empty() ? 0 : result.paired_passes.front();
    for (std::size_t p : result.paired_passes) worst = std::min(worst, p);
    out.summary.emplace_back("paired_passes_min", static_cast<double>(worst));
    out.summary.emplace_back("policy_class_size", static_cast<double>(policies.members.size()));
    io::CsvTable rows({"n2", "seed", "l1_hat", "l1_bar", "cloning_term", "deviation", "paired_ok"});
    for (const BcRow& r : result.rows)
        rows.add_row({std::to_string(r.n2), std::to_string(r.seed), format_number(r.l1_hat), format_number(r.l1_bar),
                      format_number(r.cloning_term), format_number(r.deviation), r.paired_ok ? "1" : "0"});
    out.artifacts.push_back({"bc_scaling.csv", rows.to_string()});
    out.artifacts.push_back(summary_artifact("bc_scaling_summary.csv", out.summary));
    out.artifacts.push_back(loglog_plot("bc_scaling.svg", "median cloning-objective deviation vs n2", "n2",
                                        "median sup deviation", result.n2, result.median_deviation, "median", result.fit));
    return result;
}

// ---------------------------------------------------------------- robustness

RobustnessResult run_robustness(const RobustnessOptions& o) {
    RobustnessResult result;
    const Instance inst = rate_instance(o.setup);
    for (double perturbation : o.perturbations) {
        const FunctionClasses classes =
            perturbation == 0.0
                ? build_classes(inst, o.setup.classes)
                : build_misspecified(inst.mdp, inst.dD, inst.v_star, inst.w_star, perturbation,
                                     o.setup.classes.distractors, o.setup.classes.seed,
                                     o.setup.classes.distractor_options)
                      .classes;
        for (double slack : o.slacks) {
            for (int k = 0; k < o.seeds; ++k) {
                const std::uint64_t seed = o.base_seed + static_cast<std::uint64_t>(k);
                const OfflineDataset data = generate_dataset(inst.mdp, inst.dD, o.n, o.n, dataset_seed(seed));
                PipelineOptions po;
                po.delta = o.setup.delta;
                po.eps_ov = slack;
                po.eps_ow = slack;
                po.seed = mix_seed(seed, 0x5add1e);
                RunReport r = run_pipeline(inst, classes, data, po);
                r.seed = seed;
                if (r.realized_gap <= r.rhs_realized) ++result.within_bound;
                result.perturbation.push_back(perturbation);
                result.runs.push_back(std::move(r));
            }
        }
    }
    auto& out = result.output;
    out.summary = {{"runs", static_cast<double>(result.runs.size())},
                   {"within_bound", static_cast<double>(result.within_bound)}};
    io::CsvTable table({"perturbation", "seed", "eps_opt", "eps_app", "realized_gap", "rhs_realized"});
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        const RunReport& r = result.runs[i];
        table.add_row({format_number(result.perturbation[i]), std::to_string(r.seed),
                       format_number(r.saddle.eps_ov + r.saddle.eps_ow), format_number(r.eps_app),
                       format_number(r.realized_gap), format_number(r.rhs_realized)});
    }
    out.artifacts.push_back({"robustness.csv", table.to_string()});
    out.artifacts.push_back(summary_artifact("robustness_summary.csv", out.summary));
    return result;
}

// ---------------------------------------------------------------- dispatch

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"counterexample", "rate_regularized",     "rate_unregularized",
                                                "lp_stability",   "constrained_coverage", "alpha_zero_strong",
                                                "bc_scaling",     "robustness"};
    return names;
}

SuiteOutput run_experiment_suite(const std::string& name, const SuiteRequest& request) {
    if (request.seeds < 1) throw InvalidArgument("suite seeds must be positive");
    if (name == "counterexample") {
        CounterexampleOptions o;
        o.seeds = request.seeds;
        o.base_seed = request.base_seed;
        return run_counterexample(o).output;
    }
    if (name == "rate_regularized") {
        RateOptions o;
        o.seeds = request.seeds;
        o.base_seed = request.base_seed;
        SuiteOutput out = run_rate_regularized(o).output;
        CoverageOptions c;
        c.setup = o;
        c.base_seed = request.base_seed + 1000;
        const SuiteOutput coverage = run_coverage(c).output;
        out.artifacts.insert(out.artifacts.end(), coverage.artifacts.begin(), coverage.artifacts.end());
        for (const auto& [key, value] : coverage.summary) out.summary.emplace_back("coverage_" + key, value);
        return out;
    }
    if (name == "rate_unregularized") {
        UnregularizedRateOptions o;
        o.seeds = request.seeds;
        o.base_seed = request.base_seed;
        return run_rate_unregularized(o).output;
    }
    if (name == "lp_stability") return run_lp_stability().output;
    if (name == "constrained_coverage") {
        ConstrainedOptions o;
        o.seeds = request.seeds;
        o.base_seed = request.base_seed;
        return run_constrained(o).output;
    }
    if (name == "alpha_zero_strong") {
        AlphaZeroOptions o;
        o.seeds = request.seeds;
        o.base_seed = request.base_seed;
        return run_alpha_zero(o).output;
    }
    if (name == "bc_scaling") {
        BcScalingOptions o;
        o.seeds = request.seeds;
        o.base_seed = request.base_seed;
        return run_bc_scaling(o).output;
    }
    if (name == "robustness") {
        RobustnessOptions o;
        o.seeds = request.seeds;
        o.base_seed = request.base_seed;
        return run_robustness(o).output;
    }
    throw InvalidArgument("unknown suite \"" + name + "\"");
}

SuiteOutput run_config_sweep(const ExperimentConfig& config) {
    const std::vector<std::size_t> grid = config.n_grid.empty() ? std::vector<std::size_t>{config.n} : config.n_grid;
    const std::string hash = config_hash(config);
    std::vector<RunReport> runs;
    std::vector<double> median_gap, median_error;
    for (std::size_t n : grid) {
        std::vector<double> gaps, errors;
        for (int k = 0; k < config.seeds; ++k) {
            ExperimentConfig c = config;
            c.n = n;
            if (!config.n_grid.empty()) c.n0 = n;
            c.seed = config.seed + static_cast<std::uint64_t>(k);
            RunReport r = c.bc.enabled ? run_pro_rl_bc(c) : run_pro_rl(c);
            gaps.push_back(config.alpha > 0.0 ? r.realized_gap : r.gap_to_optimal);
            errors.push_back(r.w_error);
            runs.push_back(std::move(r));
        }
        median_gap.push_back(median(gaps));
        median_error.push_back(median(errors));
    }
    SuiteOutput out;
    out.artifacts.push_back(runs_artifact("runs.csv", hash, runs));
    io::CsvTable medians({"n", "median_gap", "median_w_error"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        medians.add_row({std::to_string(grid[i]), format_number(median_gap[i]), format_number(median_error[i])});
    out.artifacts.push_back({"medians.csv", medians.to_string()});
    if (grid.size() >= 2) {
        const LineFit fit = safe_loglog(as_doubles(grid), median_error);
        add_fit(out.summary, "w_error", fit);
        out.artifacts.push_back(loglog_plot("w_error.svg", "median ||w_hat - w*||_{2,dD} vs n", "n",
                                            "median weight error", as_doubles(grid), median_error, "median", fit));
    }
    out.summary.emplace_back("runs", static_cast<double>(runs.size()));
    out.artifacts.push_back(summary_artifact("summary.csv", out.summary));
    return out;
}

void write_artifacts(const SuiteOutput& output, const std::string& directory) {
    std::filesystem::create_directories(directory);
    for (const Artifact& a : output.artifacts) io::write_file((std::filesystem::path(directory) / a.name).string(), a.contents);
}

}  // namespace prorl
