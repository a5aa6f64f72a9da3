#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prorl/bounds.hpp"
#include "prorl/classes.hpp"
#include "prorl/dataset.hpp"
#include "prorl/mdp.hpp"
#include "prorl/oracle.hpp"
#include "prorl/regularizer.hpp"
#include "prorl/saddle.hpp"

namespace prorl {

struct MdpSpec {
    std::string kind = "random";  // random | ergodic | tied | counterexample | file
    int num_states = 10;
    int num_actions = 3;
    double gamma = 0.9;
    double mixing = 0.5;  // ergodic only
    int instance = 2;     // counterexample only
    std::string path;     // file only
    std::uint64_t seed = 1;
};

struct DataSpec {
    // behavior: dD = d^{pi_D} for a seeded behavior policy. occupancy: an
    // arbitrary seeded distribution over cells. builtin: the instance's own dD
    // (counterexample only).
    std::string mode = "behavior";
    double floor = 0.05;  // minimum behavior probability or cell mass before normalizing
    std::uint64_t seed = 2;
    // When set, the dataset is read from these JSONL files instead of sampled.
    std::string transitions_path;
    std::string init_states_path;
};

struct ClassSpec {
    std::string kind = "realizable";  // realizable | misspecified
    int distractors = 30;
    DistractorOptions distractor_options;
    double perturbation = 0.0;  // misspecified only
    std::uint64_t seed = 3;
};

struct BcSpec {
    bool enabled = false;
    double split = 0.9;  // fraction of transitions used for weight estimation
    int policy_distractors = 9;
    std::uint64_t seed = 4;
};

struct ExperimentConfig {
    MdpSpec mdp;
    DataSpec data;
    Regularizer reg = Regularizer::quadratic(1.0);
    double alpha = 0.1;
    std::optional<double> cap;
    ClassSpec classes;
    std::size_t n = 1000;
    std::size_t n0 = 1000;
    std::uint64_t seed = 0;
    double delta = 0.1;
    double eps_ov = 0.0;
    double eps_ow = 0.0;
    BcSpec bc;
    std::vector<std::size_t> n_grid;  // experiment sweeps; empty means {n}
    int seeds = 20;
};

// Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);
// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& text);
// FNV-1a over the canonical JSON of the config with seed, n and n0 removed.
std::string config_hash(const ExperimentConfig& config);

/// A fully solved problem: MDP, data distribution and target solution.
struct Instance {
    TabularMdp mdp;
    Occupancy dD;
    Policy behavior;
    Regularizer reg;
    double alpha;
    std::optional<double> cap;
    Vector v_star;  // v*_alpha, or v*_0 when alpha = 0
    Matrix w_star;
    Occupancy d_star;
    Policy pi_star;
    double j_star_alpha = 0.0;
    double j_star_0 = 0.0;
    std::optional<StrongConcentrability> strong;  // alpha = 0 only
};

// alpha = 0 uses w*_0 = d^{pi*_0} / dD and requires dD to cover d^{pi*_0}.
Instance make_instance(TabularMdp mdp, Occupancy dD, Regularizer reg, double alpha, std::optional<double> cap = {});

TabularMdp build_mdp(const MdpSpec& spec);
Occupancy build_data_distribution(const TabularMdp& mdp, const MdpSpec& mdp_spec, const DataSpec& spec);

struct PipelineOptions {
    double delta = 0.1;
    double eps_ov = 0.0;
    double eps_ow = 0.0;
    std::uint64_t seed = 0;  // tie-breaking stream of the inexact solver
    std::optional<PolicyClass> policies;  // enables behavior-cloning extraction
    double bc_split = 0.9;
};

struct BcReport {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t clone_index = 0;
    double policy_l1 = 0.0;  // E_{d*}||pi* - pi_bar||_1
    double j_bar = 0.0;
    double cloning_term = 0.0;
    double rhs = 0.0;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t n0 = 0;
    double alpha = 0.0;
    std::size_t v_size = 0;
    std::size_t w_size = 0;
    double j_hat = 0.0;
    double j_star_alpha = 0.0;
    double j_star_0 = 0.0;
    double realized_gap = 0.0;    // J(pi*_alpha) - J(pi_hat)
    double gap_to_optimal = 0.0;  // J(pi*_0) - J(pi_hat)
    double policy_l1 = 0.0;       // E_{d*_alpha}||pi*_alpha - pi_hat||_1
    double w_error = 0.0;         // ||w_hat - w*_alpha||_{2,dD}
    double max_deviation = 0.0;   // max over class pairs of |L_hat - L|
    double eps_app = 0.0;
    BoundReport bounds;
    double rhs_realized = 0.0;  // the bound with max_deviation in place of eps_stat
    double rhs_alpha_zero = 0.0;
    SaddleSolution saddle;
    Policy pi_hat;
    std::optional<BcReport> bc;
};

// Saddle solve, extraction and exact evaluation on fixed classes and data.
RunReport run_pipeline(const Instance& instance, const FunctionClasses& classes, const OfflineDataset& data,
                       const PipelineOptions& options);

// Classes the config asks for, around the instance's target pair.
FunctionClasses build_classes(const Instance& instance, const ClassSpec& spec);
PolicyClass build_policy_class(const Instance& instance, const BcSpec& spec);

// Seed of the dataset drawn for run `seed` of a config.
std::uint64_t dataset_seed(std::uint64_t seed);

// Every stage failure is rethrown as PipelineError naming the stage.
RunReport run_pro_rl(const ExperimentConfig& config);
RunReport run_pro_rl_bc(const ExperimentConfig& config);

// CSV header and row used by every report.
std::vector<std::string> report_header();
std::vector<std::string> report_row(const std::string& hash, const RunReport& report);

}  // namespace prorl
