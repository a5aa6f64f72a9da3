// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "prorl/bounds.hpp"
#include "prorl/classes.hpp"
#include "prorl/counterexample.hpp"
#include "prorl/dataset.hpp"
#include "prorl/extraction.hpp"
#include "prorl/generators.hpp"
#include "prorl/harness.hpp"
#include "prorl/io.hpp"
#include "prorl/objective.hpp"
#include "prorl/oracle.hpp"
#include "prorl/rng.hpp"
#include "prorl/saddle.hpp"
#include "prorl/suites.hpp"

using namespace prorl;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

class Detail {
public:
    Detail& add(const std::string& key, double value) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s%s=%.4g", text_.empty() ? "" : ", ", key.c_str(), value);
        text_ += buf;
        return *this;
    }
    Detail& add(const std::string& key, const std::string& value) {
        text_ += (text_.empty() ? "" : ", ") + key + "=" + value;
        return *this;
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Suites shared by several criteria are run once.
struct Cache {
    std::optional<RateResult> rate;
    double rate_seconds = 0.0;
    std::optional<CoverageResult> coverage;
    double coverage_seconds = 0.0;
};

Cache& cache() {
    static Cache c;
    return c;
}

const RateResult& rate_result() {
    if (!cache().rate) {
        const auto t0 = std::chrono::steady_clock::now();
        cache().rate = run_rate_regularized();
        cache().rate_seconds = seconds_since(t0);
    }
    return *cache().rate;
}

const CoverageResult& coverage_result() {
    if (!cache().coverage) {
        const auto t0 = std::chrono::steady_clock::now();
        cache().coverage = run_coverage();
        cache().coverage_seconds = seconds_since(t0);
    }
    return *cache().coverage;
}

// ---------------------------------------------------------------- 1

Outcome counterexample_failure() {
    using namespace counterexample;
    const auto t0 = std::chrono::steady_clock::now();
    const Regularizer reg = Regularizer::quadratic(1.0);
    double worst_regret = -1.0, worst_r_regret = 0.0, max_tie = 0.0;
    bool order_ok = true;
    for (int instance : {1, 2}) {
        const CounterexampleBundle b = build_counterexample(0.9, instance);
        max_tie = std::max(max_tie, std::abs(population_lagrangian(b.mdp, b.data, reg, 0.0, b.v0, b.w1) -
                                             population_lagrangian(b.mdp, b.data, reg, 0.0, b.v0, b.w2)));
        const ValueClass v = make_value_class({b.v0}, b.v0.lpNorm<Eigen::Infinity>(), false, BoundAction::reject);
        const WeightClass w = make_weight_class({b.w2, b.w1}, std::max(b.w1.maxCoeff(), b.w2.maxCoeff()), std::nullopt,
                                                BoundAction::reject);
        const Matrix payoffs = population_payoffs(b.mdp, b.data, v, w, reg, 0.0);
        const SaddleSolution s = solve_exact(payoffs, v, w);
        // Re-enumerate: the first row attaining the max-min, scanning in class order.
        std::size_t first = 0;
        for (std::size_t i = 1; i < w.members.size(); ++i)
            if (payoffs.row(static_cast<Eigen::Index>(i)).minCoeff() > payoffs.row(static_cast<Eigen::Index>(first)).minCoeff())
                first = i;
        order_ok = order_ok && s.w_index == first;
        const Policy pi_hat = extract_policy(s.w_hat, b.behavior).policy;
        const double j_opt = policy_return(b.mdp, solve_unregularized(b.mdp).pi);
        Policy r_policy = Policy::uniform(4, 2);
        r_policy.probs.row(A) << 0.0, 1.0;
        const double regret = j_opt - policy_return(b.mdp, pi_hat);
        if (regret > worst_regret) {
            worst_regret = regret;
            worst_r_regret = j_opt - policy_return(b.mdp, r_policy);
        }
    }
    const double secs = seconds_since(t0);
    const bool pass = max_tie < 1e-12 && order_ok && worst_r_regret > 0.0 && worst_regret >= 0.9 * worst_r_regret &&
                      secs < 1.0;
    return {pass, Detail()
                      .add("tie", max_tie)
                      .add("regret", worst_regret)
                      .add("r_policy_regret", worst_r_regret)
                      .add("seconds", secs)
                      .str()};
}

// ---------------------------------------------------------------- 2

Outcome regularization_fixes_it() {
    const auto t0 = std::chrono::steady_clock::now();
    const CounterexampleResult r = run_counterexample();
    const double secs = seconds_since(t0);
    double mass = 0.0;
    std::size_t fewest = r.instances.front().successes.front();
    bool pass = secs < 10.0;
    CounterexampleOptions o;
    for (const CounterexampleInstance& ci : r.instances) {
        mass = std::max(mass, ci.mass_a_r);
        for (std::size_t k = 0; k < o.n_grid.size(); ++k) {
            fewest = std::min(fewest, ci.successes[k]);
            if (o.n_grid[k] >= 10000 && ci.successes[k] < 18) pass = false;
        }
    }
    pass = pass && mass < 1e-8 && o.seeds == 20;
    return {pass, Detail()
                      .add("mass_A_R", mass)
                      .add("min_successes", static_cast<double>(fewest))
                      .add("of", 20.0)
                      .add("seconds", secs)
                      .str()};
}

// ---------------------------------------------------------------- 3

Outcome oracle_certification() {
    const auto t0 = std::chrono::steady_clock::now();
    const Regularizer reg = Regularizer::quadratic(1.0);
    int kkt_ok = 0, vbound_ok = 0, agree_ok = 0, cases = 0;
    double worst_kkt = 0.0, worst_gap = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t seed = mix_seed(0xacce, static_cast<std::uint64_t>(i));
        const int S = 2 + static_cast<int>(seed % 7);
        const int A = 2 + static_cast<int>((seed >> 8) % 2);
        const TabularMdp mdp = random_mdp(S, A, 0.9, seed);
        const Occupancy dD = behavior_occupancy(mdp, random_policy(S, A, seed + 1, 0.05));
        bool kkt = true, vbound = true, agree = true;
        for (double alpha : {0.05, 0.5}) {
            const RegularizedSolution a = solve_regularized(mdp, dD, reg, alpha);
            OracleOptions eg;
            eg.path = SolverPath::extragradient;
            eg.tolerance = 1e-12;
            const RegularizedSolution b = solve_regularized(mdp, dD, reg, alpha, eg);
            const double kkt_a = kkt_residual(mdp, dD, reg, alpha, a.v_star, a.w_star, std::nullopt);
            const double kkt_b = kkt_residual(mdp, dD, reg, alpha, b.v_star, b.w_star, std::nullopt);
            worst_kkt = std::max({worst_kkt, kkt_a, kkt_b});
            kkt = kkt && kkt_a < 1e-8 && kkt_b < 1e-8;
            const double b_v = (alpha * reg.bounds(a.w_star.maxCoeff()).b_fprime + 1.0) / (1.0 - mdp.gamma());
            vbound = vbound && a.v_star.lpNorm<Eigen::Infinity>() <= b_v;
            const double gap = std::max((a.w_star - b.w_star).cwiseAbs().maxCoeff(),
                                        (a.v_star - b.v_star).cwiseAbs().maxCoeff());
            worst_gap = std::max(worst_gap, gap);
            agree = agree && gap < 1e-7;
        }
        ++cases;
        kkt_ok += kkt;
        vbound_ok += vbound;
        agree_ok += agree;
    }
    const double secs = seconds_since(t0);
    const bool pass = kkt_ok == cases && vbound_ok == cases && agree_ok == cases && secs < 300.0;
    return {pass, Detail()
                      .add("mdps", cases)
                      .add("kkt_ok", kkt_ok)
                      .add("v_bound_ok", vbound_ok)
                      .add("paths_agree", agree_ok)
                      .add("worst_kkt", worst_kkt)
                      .add("worst_path_gap", worst_gap)
                      .add("seconds", secs)
                      .str()};
}

// ---------------------------------------------------------------- 4

Outcome inequality_chain() {
    std::size_t runs = 0, ok = 0;
    double worst_slack = -1e300;
    auto check = [&](const std::vector<RunReport>& reports, double gamma, double m_f) {
        const double scale = 1.0 / (1.0 - gamma);
        for (const RunReport& r : reports) {
            ++runs;
            const double rhs = theorem1_rhs(r.max_deviation, r.alpha, m_f, gamma);
            const bool chain = r.realized_gap <= scale * r.policy_l1 + 1e-10 &&
                               scale * r.policy_l1 <= 2.0 * scale * r.w_error + 1e-10 && r.realized_gap <= rhs;
            worst_slack = std::max(worst_slack, r.realized_gap - rhs);
            ok += chain;
        }
    };
    const RateOptions setup;
    check(rate_result().runs, setup.mdp.gamma, 1.0);
    check(coverage_result().runs, setup.mdp.gamma, 1.0);
    return {runs > 0 && ok == runs,
            Detail().add("runs", static_cast<double>(runs)).add("holding", static_cast<double>(ok)).add("max_gap_minus_rhs", worst_slack).str()};
}

// ---------------------------------------------------------------- 5

Outcome rate_check() {
    const RateResult& r = rate_result();
    const RateOptions o;
    const bool setup = o.mdp.num_states == 10 && o.mdp.num_actions == 3 && o.classes.distractors == 30 &&
                       o.alpha == 0.3 && o.seeds == 20 && o.n_grid == std::vector<std::size_t>{100, 1000, 10000, 100000};
    const bool pass = setup && r.fit.slope >= -0.5 && r.fit.slope <= -0.15 && r.monotone && cache().rate_seconds < 600.0;
    std::string medians;
    for (double m : r.median_w_error) medians += (medians.empty() ? "" : "/") + fmt("%.3g", m);
    return {pass, Detail()
                      .add("slope", r.fit.slope)
                      .add("ci", fmt("[%.3f", r.fit.ci_low) + fmt(", %.3f]", r.fit.ci_high))
                      .add("medians", medians)
                      .add("monotone", r.monotone ? "yes" : "no")
                      .add("seconds", cache().rate_seconds)
                      .str()};
}

// ---------------------------------------------------------------- 6

Outcome coverage() {
    const CoverageResult& c = coverage_result();
    const double fraction = static_cast<double>(c.violations) / static_cast<double>(c.datasets);
    const std::size_t threshold = binomial_quantile(c.datasets, 0.1, 0.99);
    const bool pass = c.datasets == 200 && fraction <= 0.1 && c.violations <= threshold && cache().coverage_seconds < 300.0;
    return {pass, Detail()
                      .add("datasets", static_cast<double>(c.datasets))
                      .add("violations", static_cast<double>(c.violations))
                      .add("binomial_threshold", static_cast<double>(threshold))
                      .add("eps_stat", c.eps_stat)
                      .add("worst_deviation", c.worst_deviation)
                      .add("seconds", cache().coverage_seconds)
                      .str()};
}

// ---------------------------------------------------------------- 7

// Golden-section minimum of E_dD f(w) along the segment of optimal occupancies.
double min_f_on_segment(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, const Matrix& d0,
                        const Matrix& d1, Matrix& argmin) {
    auto f_at = [&](double t) { return f_divergence(reg, Occupancy((1.0 - t) * d0 + t * d1), dD); };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
        if (f_at(a) <= f_at(b)) hi = b;
        else lo = a;
    }
    const double t = 0.5 * (lo + hi);
    argmin = ((1.0 - t) * d0 + t * d1).cwiseQuotient(dD.mass);
    (void)mdp;
    return t;
}

Outcome lp_stability() {
    const auto t0 = std::chrono::steady_clock::now();
    const StabilityResult r = run_lp_stability();
    // Independent limit: enumerate deterministic optimal policies, minimize f between the two.
    const TabularMdp mdp = tied_optimum_mdp(0.9);
    const Occupancy dD = behavior_occupancy(mdp, Policy::uniform(mdp.num_states(), mdp.num_actions()));
    const double j_opt = policy_return(mdp, solve_unregularized(mdp).pi);
    std::vector<Matrix> optimal;
    std::vector<int> actions(static_cast<std::size_t>(mdp.num_states()), 0);
    while (true) {
        const Policy p = Policy::deterministic(actions, mdp.num_actions());
        if (std::abs(policy_return(mdp, p) - j_opt) < 1e-12) {
            const Matrix d = exact_occupancy(mdp, p).mass;
            bool seen = false;
            for (const Matrix& m : optimal) seen = seen || (m - d).cwiseAbs().maxCoeff() < 1e-12;
            if (!seen) optimal.push_back(d);
        }
        int k = 0;
        while (k < mdp.num_states() && ++actions[static_cast<std::size_t>(k)] == mdp.num_actions())
            actions[static_cast<std::size_t>(k++)] = 0;
        if (k == mdp.num_states()) break;
    }
    double limit_error = std::numeric_limits<double>::infinity();
    if (optimal.size() == 2) {
        Matrix w_min;
        min_f_on_segment(mdp, dD, Regularizer::quadratic(1.0), optimal[0], optimal[1], w_min);
        limit_error = (r.report.rows.back().w_star - w_min).cwiseAbs().maxCoeff();
    }
    const double secs = seconds_since(t0);
    const bool pass = r.report.constant_prefix >= 3 && limit_error < 1e-6 && r.report.r_squared > 0.99 && secs < 120.0;
    return {pass, Detail()
                      .add("prefix", static_cast<double>(r.report.constant_prefix))
                      .add("optimal_vertices", static_cast<double>(optimal.size()))
                      .add("limit_error", limit_error)
                      .add("r2", r.report.r_squared)
                      .add("seconds", secs)
                      .str()};
}

// ---------------------------------------------------------------- 8

Outcome witness_identity() {
    Rng rng(0x717);
    double worst = 0.0;
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int S = 2 + static_cast<int>(rng.index(6)), A = 2 + static_cast<int>(rng.index(4));
        auto random_policy_with_ties = [&]() {
            Matrix p(S, A);
            for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = rng.index(4) == 0 ? 0.0 : rng.uniform();
            for (int s = 0; s < S; ++s) {
                if (p.row(s).sum() == 0.0) p(s, 0) = 1.0;
                p.row(s) /= p.row(s).sum();
            }
            return Policy(p);
        };
        const Policy p = random_policy_with_ties();
        const Policy q = trial % 10 == 0 ? p : random_policy_with_ties();
        Vector d(S);
        for (int s = 0; s < S; ++s) d(s) = rng.uniform();
        d /= d.sum();
        // The pair's own witness is the one returned for the ordered pair (p, q).
        double recovered = -1e300;
        for (const Matrix& h : witness_class({{p, q}}))
            recovered = std::max(recovered, d.dot((p.probs - q.probs).cwiseProduct(h).rowwise().sum()));
        const double l1 = d.dot((p.probs - q.probs).cwiseAbs().rowwise().sum());
        worst = std::max(worst, std::abs(recovered - l1));
        ok += std::abs(recovered - l1) < 1e-12;
    }
    return {ok == 100, Detail().add("cases", 100.0).add("matching", ok).add("worst_error", worst).str()};
}

// ---------------------------------------------------------------- 9

Outcome behavior_cloning() {
    const auto t0 = std::chrono::steady_clock::now();
    const BcScalingResult r = run_bc_scaling();
    const double secs = seconds_since(t0);
    std::size_t fewest = 20;
    for (std::size_t p : r.paired_passes) fewest = std::min(fewest, p);
    const bool pass = fewest >= 18 && std::abs(r.fit.slope + 0.5) <= 0.15 && secs < 600.0;
    return {pass, Detail()
                      .add("min_paired_passes", static_cast<double>(fewest))
                      .add("of", 20.0)
                      .add("slope", r.fit.slope)
                      .add("seconds", secs)
                      .str()};
}

// ---------------------------------------------------------------- 10

Outcome alpha_zero() {
    const auto t0 = std::chrono::steady_clock::now();
    const AlphaZeroResult r = run_alpha_zero();
    const double secs = seconds_since(t0);
    const bool pass = r.strong.holds && r.fit.slope >= -0.65 && r.fit.slope <= -0.35 && secs < 600.0;
    return {pass, Detail()
                      .add("strong_concentrability", r.strong.holds ? "yes" : "no")
                      .add("b_wu", r.strong.b_wu)
                      .add("b_wl", r.strong.b_wl)
                      .add("slope", r.fit.slope)
                      .add("ci", fmt("[%.3f", r.fit.ci_low) + fmt(", %.3f]", r.fit.ci_high))
                      .add("seconds", secs)
                      .str()};
}

// ---------------------------------------------------------------- 11

Outcome constrained() {
    const ConstrainedOptions o;
    const ConstrainedResult r = run_constrained(o);
    double w_max = 0.0;
    for (const ConstrainedRow& row : r.rows) w_max = std::max(w_max, row.w_hat_max);
    const bool pass = !r.optimal_covered && !r.rows.empty() && r.within_bound == r.rows.size() &&
                      r.within_cap == r.rows.size() && w_max <= o.cap;
    return {pass, Detail()
                      .add("pi0_covered", r.optimal_covered ? "yes" : "no")
                      .add("runs", static_cast<double>(r.rows.size()))
                      .add("within_bound", static_cast<double>(r.within_bound))
                      .add("max_w_hat", w_max)
                      .add("cap", o.cap)
                      .str()};
}

// ---------------------------------------------------------------- 12

Outcome determinism() {
    ExperimentConfig c = parse_config(
        R"({"mdp":{"num_states":6,"num_actions":3},"alpha":0.2,"n_grid":[100,1000],"seeds":3,"classes":{"distractors":8}})");
    auto dataset_bytes = [&]() {
        const TabularMdp mdp = build_mdp(c.mdp);
        const Occupancy dD = build_data_distribution(mdp, c.mdp, c.data);
        const OfflineDataset data = generate_dataset(mdp, dD, 2000, 200, dataset_seed(5));
        return io::transitions_to_jsonl(data) + io::init_states_to_jsonl(data);
    };
    auto sweep_bytes = [&]() {
        std::string all;
        for (const Artifact& a : run_config_sweep(c).artifacts) all += a.name + "\n" + a.contents;
        return all;
    };
    auto suite_bytes = [&]() {
        SuiteRequest req;
        req.seeds = 3;
        std::string all;
        for (const Artifact& a : run_experiment_suite("counterexample", req).artifacts) all += a.name + "\n" + a.contents;
        return all;
    };
    const bool data_same = dataset_bytes() == dataset_bytes();
    const bool sweep_same = sweep_bytes() == sweep_bytes();
    const bool suite_same = suite_bytes() == suite_bytes();
    return {data_same && sweep_same && suite_same, Detail()
                                                       .add("dataset", data_same ? "identical" : "differs")
                                                       .add("sweep_csv", sweep_same ? "identical" : "differs")
                                                       .add("suite_csv", suite_same ? "identical" : "differs")
                                                       .str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"counterexample reproduction", counterexample_failure},
        {"regularization fixes the counterexample", regularization_fixes_it},
        {"oracle KKT certification", oracle_certification},
        {"weight-error inequality chain", inequality_chain},
        {"regularized rate", rate_check},
        {"concentration coverage", coverage},
        {"LP stability", lp_stability},
        {"witness identity", witness_identity},
        {"behavior cloning", behavior_cloning},
        {"alpha = 0 under strong concentrability", alpha_zero},
        {"constrained variant", constrained},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += !out.pass;
        std::printf("%s %2zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    out.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
