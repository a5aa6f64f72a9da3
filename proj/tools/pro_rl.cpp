// pro-rl: command line front end for dataset generation, the oracle, the
// saddle-point estimator, behavior cloning and the experiment suites.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "prorl/dataset.hpp"
#include "prorl/error.hpp"
#include "prorl/extraction.hpp"
#include "prorl/harness.hpp"
#include "prorl/io.hpp"
#include "prorl/oracle.hpp"
#include "prorl/rng.hpp"
#include "prorl/saddle.hpp"
#include "prorl/stats.hpp"
#include "prorl/suites.hpp"
#include "prorl/svg.hpp"

namespace fs = std::filesystem;
using namespace prorl;

namespace {

struct Common {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment config JSON")->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--seed", c.seed, "run seed (overrides the config)");
}

ExperimentConfig load_config(const Common& c) {
    ExperimentConfig config = c.config.empty() ? ExperimentConfig{} : parse_config(io::read_file(c.config));
    if (c.seed) config.seed = *c.seed;
    return config;
}

std::string path_in(const Common& c, const std::string& name) { return (fs::path(c.out) / name).string(); }

void announce(const std::string& path) { std::cout << "wrote " << path << '\n'; }

void write(const Common& c, const std::string& name, const std::string& contents) {
    const std::string path = path_in(c, name);
    io::write_file(path, contents);
    announce(path);
}

void use_mdp_file(ExperimentConfig& config, const std::string& mdp_path) {
    if (mdp_path.empty()) return;
    config.mdp.kind = "file";
    config.mdp.path = mdp_path;
}

Instance config_instance(const ExperimentConfig& config) {
    TabularMdp mdp = build_mdp(config.mdp);
    Occupancy dD = build_data_distribution(mdp, config.mdp, config.data);
    return make_instance(std::move(mdp), std::move(dD), config.reg, config.alpha, config.cap);
}

// ---------------------------------------------------------------- subcommands

void gen_mdp(const Common& c) {
    ExperimentConfig config = load_config(c);
    if (c.seed) config.mdp.seed = *c.seed;
    write(c, "mdp.json", io::mdp_to_json(build_mdp(config.mdp)));
}

void gen_data(const Common& c, const std::string& mdp_path) {
    ExperimentConfig config = load_config(c);
    use_mdp_file(config, mdp_path);
    const TabularMdp mdp = build_mdp(config.mdp);
    const Occupancy dD = build_data_distribution(mdp, config.mdp, config.data);
    const OfflineDataset data = generate_dataset(mdp, dD, config.n, config.n0, dataset_seed(config.seed));
    if (mdp_path.empty()) write(c, "mdp.json", io::mdp_to_json(mdp));
    write(c, "data_distribution.json", io::occupancy_to_json(dD));
    write(c, "transitions.jsonl", io::transitions_to_jsonl(data));
    write(c, "init_states.jsonl", io::init_states_to_jsonl(data));
}

void oracle(const Common& c, const std::string& mdp_path) {
    ExperimentConfig config = load_config(c);
    use_mdp_file(config, mdp_path);
    const TabularMdp mdp = build_mdp(config.mdp);
    const Occupancy dD = build_data_distribution(mdp, config.mdp, config.data);
    OracleOptions options;
    options.cap = config.cap;
    const RegularizedSolution solution = solve_regularized(mdp, dD, config.reg, config.alpha, options);
    write(c, "solution.json", io::solution_to_json(solution));
    const Instance inst = make_instance(mdp, dD, config.reg, config.alpha, config.cap);
    write(c, "classes.json", io::classes_to_json(build_classes(inst, config.classes)));
    write(c, "policies.json", io::policy_class_to_json(build_policy_class(inst, config.bc)));
    std::cout << "kkt_residual " << io::format_number(solution.kkt_residual) << '\n';
}

struct DataFiles {
    std::string transitions;
    std::string init_states;
};

void add_data_files(CLI::App* cmd, DataFiles& files) {
    cmd->add_option("--transitions", files.transitions, "transitions JSONL")->required()->check(CLI::ExistingFile);
    cmd->add_option("--init-states", files.init_states, "initial states JSONL")->required()->check(CLI::ExistingFile);
}

OfflineDataset read_dataset(const DataFiles& files, int num_states, int num_actions, double gamma) {
    return io::dataset_from_jsonl(io::read_file(files.transitions), io::read_file(files.init_states), num_states,
                                  num_actions, gamma);
}

void solve(const Common& c, const DataFiles& files, const std::string& classes_path, const std::string& mdp_path) {
    ExperimentConfig config = load_config(c);
    use_mdp_file(config, mdp_path);
    const Instance inst = config_instance(config);
    const FunctionClasses classes = classes_path.empty() ? build_classes(inst, config.classes)
                                                         : io::classes_from_json(io::read_file(classes_path));
    const OfflineDataset data = read_dataset(files, inst.mdp.num_states(), inst.mdp.num_actions(), inst.mdp.gamma());
    const SaddleSolution saddle = solve_inexact(data, classes.values, classes.weights, config.reg, config.alpha,
                                                config.eps_ov, config.eps_ow, mix_seed(config.seed, 0x5add1e));
    write(c, "saddle.json", io::saddle_to_json(saddle));
    write(c, "pi_hat.json", io::policy_to_json(extract_policy(saddle.w_hat, inst.behavior).policy));
}

void extract_bc(const Common& c, const DataFiles& files, const std::string& weights_path,
                const std::string& policies_path) {
    const ExperimentConfig config = load_config(c);
    const Matrix w_hat = io::weights_from_saddle_json(io::read_file(weights_path));
    const PolicyClass policies = io::policy_class_from_json(io::read_file(policies_path));
    const OfflineDataset data =
        read_dataset(files, static_cast<int>(w_hat.rows()), static_cast<int>(w_hat.cols()), config.mdp.gamma);
    const CloneResult clone = clone_policy(w_hat, data, policies);
    write(c, "pi_bar.json", io::policy_to_json(clone.policy));
    std::cout << "clone_index " << clone.index << " objective " << io::format_number(clone.objective) << '\n';
}

void experiment(const Common& c, const std::string& suite, std::optional<int> seeds) {
    SuiteOutput output;
    if (!suite.empty()) {
        SuiteRequest request;
        if (seeds) request.seeds = *seeds;
        if (c.seed) request.base_seed = *c.seed;
        output = run_experiment_suite(suite, request);
    } else {
        if (c.config.empty()) throw InvalidArgument("experiment needs --suite or --config");
        ExperimentConfig config = load_config(c);
        if (seeds) config.seeds = *seeds;
        output = run_config_sweep(config);
    }
    write_artifacts(output, c.out);
    for (const Artifact& a : output.artifacts) announce(path_in(c, a.name));
    for (const auto& [key, value] : output.summary) std::cout << key << ' ' << io::format_number(value) << '\n';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

// Per-n medians of an experiment's run rows, with a log-log chart.
void report(const Common& c, std::string runs_path) {
    if (runs_path.empty()) runs_path = path_in(c, "runs.csv");
    std::stringstream in(io::read_file(runs_path));
    std::string line;
    std::getline(in, line);
    const std::vector<std::string> header = split_csv_line(line);
    if (header != report_header()) throw InvalidArgument(runs_path + ": not a run report (header mismatch)");
    auto column = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    const std::vector<std::string> metrics{"realized_gap", "gap_to_optimal", "w_error", "eps_stat", "rhs_theorem1"};
    std::map<double, std::map<std::string, std::vector<double>>> by_n;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) throw InvalidArgument(runs_path + ": ragged row");
        auto& bucket = by_n[std::stod(cells[column("n")])];
        for (const std::string& m : metrics) bucket[m].push_back(std::stod(cells[column(m)]));
    }
    if (by_n.empty()) throw InvalidArgument(runs_path + ": no rows");

    std::vector<std::string> out_header{"n", "runs"};
    for (const std::string& m : metrics) out_header.push_back("median_" + m);
    io::CsvTable table(out_header);
    std::vector<double> ns, gaps, rhs;
    for (const auto& [n, bucket] : by_n) {
        std::vector<std::string> row{io::format_number(n), std::to_string(bucket.at(metrics[0]).size())};
        for (const std::string& m : metrics) row.push_back(io::format_number(median(bucket.at(m))));
        table.add_row(std::move(row));
        ns.push_back(n);
        gaps.push_back(median(bucket.at("w_error")));
        rhs.push_back(median(bucket.at("rhs_theorem1")));
    }
    write(c, "report.csv", table.to_string());

    ChartOptions chart;
    chart.title = "median weight error and bound vs n";
    chart.x_label = "n";
    chart.y_label = "value";
    chart.log_x = chart.log_y = true;
    std::vector<Series> series{{"median ||w_hat - w*||", ns, gaps}};
    bool rhs_finite = true;
    for (double v : rhs) rhs_finite = rhs_finite && std::isfinite(v) && v > 0.0;
    if (rhs_finite) series.push_back({"median rhs_theorem1", ns, rhs});
    if (ns.size() >= 2) {
        bool positive = true;
        for (double g : gaps) positive = positive && g > 0.0;
        if (positive) {
            const LineFit fit = fit_loglog(ns, gaps);
            chart.title += " (slope " + io::format_number(fit.slope) + ")";
        }
    }
    write(c, "report.svg", render_line_chart(series, chart));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PRO-RL offline reinforcement learning on finite MDPs"};
    app.require_subcommand(1);

    Common common;
    std::string mdp_path, classes_path, weights_path, policies_path, suite, runs_path;
    std::optional<int> seeds;
    DataFiles files;

    auto* gen_mdp_cmd = app.add_subcommand("gen-mdp", "generate an MDP from the config's mdp section");
    add_common(gen_mdp_cmd, common);

    auto* gen_data_cmd = app.add_subcommand("gen-data", "sample a dataset (transitions and initial states)");
    add_common(gen_data_cmd, common);
    gen_data_cmd->add_option("--mdp", mdp_path, "MDP JSON (overrides the config)")->check(CLI::ExistingFile);

    auto* oracle_cmd = app.add_subcommand("oracle", "solve the regularized occupancy LP exactly");
    add_common(oracle_cmd, common);
    oracle_cmd->add_option("--mdp", mdp_path, "MDP JSON (overrides the config)")->check(CLI::ExistingFile);

    auto* solve_cmd = app.add_subcommand("solve", "empirical max-min over finite classes");
    add_common(solve_cmd, common);
    add_data_files(solve_cmd, files);
    solve_cmd->add_option("--classes", classes_path, "classes JSON (default: built from the config)")
        ->check(CLI::ExistingFile);
    solve_cmd->add_option("--mdp", mdp_path, "MDP JSON (overrides the config)")->check(CLI::ExistingFile);

    auto* bc_cmd = app.add_subcommand("extract-bc", "behavior-cloning extraction over a policy class");
    add_common(bc_cmd, common);
    add_data_files(bc_cmd, files);
    bc_cmd->add_option("--weights", weights_path, "saddle solution JSON holding w_hat")->required()->check(CLI::ExistingFile);
    bc_cmd->add_option("--policies", policies_path, "policy class JSON")->required()->check(CLI::ExistingFile);

    auto* exp_cmd = app.add_subcommand("experiment", "run a named suite or a config sweep");
    add_common(exp_cmd, common);
    exp_cmd->add_option("--suite", suite, "suite name")->check(CLI::IsMember(suite_names()));
    exp_cmd->add_option("--seeds", seeds, "seeds per grid point")->check(CLI::PositiveNumber);

    auto* report_cmd = app.add_subcommand("report", "summarize a runs.csv into per-n medians and a chart");
    add_common(report_cmd, common);
    report_cmd->add_option("--runs", runs_path, "run report CSV (default: <out>/runs.csv)")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_mdp_cmd) gen_mdp(common);
        else if (*gen_data_cmd) gen_data(common, mdp_path);
        else if (*oracle_cmd) oracle(common, mdp_path);
        else if (*solve_cmd) solve(common, files, classes_path, mdp_path);
        else if (*bc_cmd) extract_bc(common, files, weights_path, policies_path);
        else if (*exp_cmd) experiment(common, suite, seeds);
        else if (*report_cmd) report(common, runs_path);
    } catch (const std::exception& e) {
        std::cerr << "pro-rl: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
