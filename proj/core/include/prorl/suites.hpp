#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prorl/harness.hpp"
#include "prorl/oracle.hpp"
#include "prorl/stats.hpp"

namespace prorl {

struct Artifact {
    std::string name;  // file name inside the output directory
    std::string contents;
};

struct SuiteOutput {
    std::vector<Artifact> artifacts;
    std::vector<std::pair<std::string, double>> summary;
};

// ---- counterexample: objective tie, adversarial regret, regularized fix

struct CounterexampleOptions {
    double gamma = 0.9;
    double alpha = 0.1;
    std::vector<std::size_t> n_grid{10000, 100000};
    int seeds = 20;
    std::uint64_t base_seed = 0;
};

struct CounterexampleInstance {
    int instance = 0;
    double tie_gap = 0.0;          // |L_0(v0, w1) - L_0(v0, w2)|
    double regret = 0.0;           // J(pi*_0) - J(pi_hat), W = {w2, w1}, V = {v0}, population objective
    double r_policy_regret = 0.0;  // regret of "R at A, uniform at C"
    double mass_a_r = 0.0;         // d*_alpha(A, R)
    std::vector<std::size_t> successes;  // per n: runs with pi_hat(L|A) > 0.999
};

struct CounterexampleResult {
    std::vector<CounterexampleInstance> instances;
    int worst_instance = 0;
    double worst_regret = 0.0;
    double average_regret = 0.0;
    std::vector<RunReport> runs;
    SuiteOutput output;
};

CounterexampleResult run_counterexample(const CounterexampleOptions& options = {});

// ---- rate_regularized: ||w_hat - w*_alpha|| against n, plus bound coverage

struct RateOptions {
    MdpSpec mdp{"random", 10, 3, 0.9, 0.5, 2, "", 11};
    DataSpec data{"occupancy", 0.2, 12, "", ""};
    double alpha = 0.3;
    ClassSpec classes{"realizable", 30, {DistractorMode::multiscale, 0.5, 1e-3}, 0.0, 13};
    std::vector<std::size_t> n_grid{100, 1000, 10000, 100000};
    int seeds = 20;
    double delta = 0.1;
    std::uint64_t base_seed = 0;
};

struct RateResult {
    std::vector<RunReport> runs;  // ordered by n, then seed
    std::vector<double> n;
    std::vector<double> median_w_error;
    std::vector<double> median_gap;
    LineFit fit;  // log-log fit of median_w_error
    bool monotone = false;
    SuiteOutput output;
};

RateResult run_rate_regularized(const RateOptions& options = {});

struct CoverageOptions {
    RateOptions setup;
    std::size_t n = 1000;
    std::size_t n0 = 1000;
    std::size_t datasets = 200;
    double level = 0.99;
    std::uint64_t base_seed = 1000;
};

struct CoverageResult {
    std::size_t datasets = 0;
    std::size_t violations = 0;  // datasets with max |L_hat - L| > eps_stat
    std::size_t threshold = 0;   // binomial(datasets, delta) quantile at the level
    double eps_stat = 0.0;
    double worst_deviation = 0.0;
    std::vector<RunReport> runs;
    SuiteOutput output;
};

CoverageResult run_coverage(const CoverageOptions& options = {});

// ---- rate_unregularized: J(pi*_0) - J(pi_hat) with alpha tuned to n

struct UnregularizedRateOptions {
    MdpSpec mdp{"random", 10, 3, 0.9, 0.5, 2, "", 11};
    DataSpec data{"behavior", 0.2, 12, "", ""};
    ClassSpec classes{"realizable", 30, {DistractorMode::multiscale, 0.5, 1e-3}, 0.0, 13};
    std::vector<std::size_t> n_grid{100, 1000, 10000, 100000};
    int seeds = 20;
    double delta = 0.1;
    double eps_scale = 1.0;  // target accuracy eps_n = eps_scale * n^(-1/6)
    std::uint64_t base_seed = 0;
};

struct UnregularizedRateResult {
    std::vector<RunReport> runs;
    std::vector<double> n;
    std::vector<double> alpha;
    std::vector<double> median_gap;
    LineFit fit;
    SuiteOutput output;
};

UnregularizedRateResult run_rate_unregularized(const UnregularizedRateOptions& options = {});

// ---- lp_stability: constant w*_alpha for small alpha on a tied-optimum MDP

struct StabilityOptions {
    double gamma = 0.9;
    std::vector<double> alphas{0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
    double tolerance = 1e-6;
};

struct StabilityResult {
    StabilityReport report;
    double t_star = 0.0;   // position of the min-f optimal occupancy on the optimal segment
    Matrix w_min_f;        // its ratio to dD
    double limit_error = 0.0;  // max |w*_{alpha_min} - w_min_f|
    SuiteOutput output;
};

StabilityResult run_lp_stability(const StabilityOptions& options = {});

// ---- constrained_coverage: capped variant against pi*_{0,B_w} without coverage of pi*_0

struct ConstrainedOptions {
    int num_states = 6;
    int num_actions = 3;
    double gamma = 0.9;
    std::uint64_t mdp_seed = 41;
    std::uint64_t behavior_seed = 42;
    double alpha = 0.1;
    double cap = 2.0;
    double alpha_small = 1e-4;  // proxy for the unregularized capped LP
    int distractors = 30;
    std::uint64_t class_seed = 43;
    std::vector<std::size_t> n_grid{100, 1000, 10000, 100000};
    int seeds = 20;
    double delta = 0.1;
    std::uint64_t base_seed = 0;
};

struct ConstrainedRow {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double j_hat = 0.0;
    double gap = 0.0;  // upper estimate of J(pi*_{0,B_w}) - J(pi_hat)
    double rhs = 0.0;  // 2 alpha B_f + theorem1_rhs at the realized deviation
    double w_hat_max = 0.0;
};

struct ConstrainedResult {
    bool optimal_covered = true;  // whether dD covers d^{pi*_0}
    double j_star_0 = 0.0;
    double j_capped_upper = 0.0;  // J(pi*_{alpha_small,B}) + 2 alpha_small B_f
    double j_capped_alpha = 0.0;  // J(pi*_{alpha,B})
    std::vector<ConstrainedRow> rows;
    std::vector<RunReport> runs;
    std::size_t within_bound = 0;
    std::size_t within_cap = 0;
    SuiteOutput output;
};

ConstrainedResult run_constrained(const ConstrainedOptions& options = {});

// ---- alpha_zero_strong: alpha = 0 under strong concentrability

struct AlphaZeroOptions {
    int num_states = 10;
    int num_actions = 2;
    double gamma = 0.9;
    double gap_max = 0.1;  // advantage gaps of the suboptimal actions, geometric
    double gap_min = 1e-5;
    double mixing = 0.3;
    std::uint64_t mdp_seed = 31;
    std::vector<std::size_t> n_grid{100, 1000, 10000, 100000};
    int seeds = 20;
    double delta = 0.1;
    std::uint64_t base_seed = 0;
};

struct AlphaZeroResult {
    StrongConcentrability strong;
    std::vector<RunReport> runs;
    std::vector<double> n;
    std::vector<double> mean_gap;
    LineFit fit;  // log-log fit of mean_gap
    std::size_t within_bound = 0;
    SuiteOutput output;
};

AlphaZeroResult run_alpha_zero(const AlphaZeroOptions& options = {});

// ---- bc_scaling: behavior cloning against n2 at fixed n1

struct BcScalingOptions {
    RateOptions setup;
    std::size_t n1 = 10000;
    std::vector<std::size_t> n2_grid{100, 1000, 10000, 100000};
    int policy_distractors = 9;
    std::uint64_t policy_seed = 14;
    int seeds = 20;
    double delta = 0.1;
    double slack = 1.5;  // multiplier on the cloning term in the paired check
    std::uint64_t base_seed = 0;
};

struct BcRow {
    std::size_t n2 = 0;
    std::uint64_t seed = 0;
    double l1_hat = 0.0;  // E_{d*}||pi* - pi_hat||_1
    double l1_bar = 0.0;  // E_{d*}||pi* - pi_bar||_1
    double cloning_term = 0.0;
    double deviation = 0.0;  // sup over the policy class of |G_hat - G|
    bool paired_ok = false;
};

struct BcScalingResult {
    std::vector<BcRow> rows;
    std::vector<double> n2;
    std::vector<double> median_deviation;
    std::vector<std::size_t> paired_passes;  // per n2
    LineFit fit;
    SuiteOutput output;
};

BcScalingResult run_bc_scaling(const BcScalingOptions& options = {});

// ---- robustness: misspecified classes and inexact solves

struct RobustnessOptions {
    RateOptions setup;
    std::vector<double> perturbations{0.0, 0.01, 0.05};
    std::vector<double> slacks{0.0, 1e-3};
    std::size_t n = 10000;
    int seeds = 20;
    std::uint64_t base_seed = 0;
};

struct RobustnessResult {
    std::vector<RunReport> runs;
    std::vector<double> perturbation;  // per run
    std::size_t within_bound = 0;
    SuiteOutput output;
};

RobustnessResult run_robustness(const RobustnessOptions& options = {});

// ---- dispatch

struct SuiteRequest {
    int seeds = 20;
    std::uint64_t base_seed = 0;
};

const std::vector<std::string>& suite_names();
SuiteOutput run_experiment_suite(const std::string& name, const SuiteRequest& request = {});

// Sweep of one config over its n grid and seeds; rows sorted by (n, seed).
SuiteOutput run_config_sweep(const ExperimentConfig& config);

void write_artifacts(const SuiteOutput& output, const std::string& directory);

}  // namespace prorl
