#include "prorl/harness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include <json.hpp>

#include "prorl/counterexample.hpp"
#include "prorl/error.hpp"
#include "prorl/extraction.hpp"
#include "prorl/generators.hpp"
#include "prorl/io.hpp"
#include "prorl/objective.hpp"
#include "prorl/rng.hpp"

namespace prorl {

using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw InvalidArgument(std::string(where) + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (!keys.count(item.key())) throw InvalidArgument(std::string(where) + ": unknown field \"" + item.key() + "\"");
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config field \"") + key + "\": " + e.what());
    }
}

const char* mode_name(DistractorMode mode) {
    switch (mode) {
        case DistractorMode::uniform: return "uniform";
        case DistractorMode::perturbed: return "perturbed";
        case DistractorMode::multiscale: return "multiscale";
    }
    return "uniform";
}

DistractorMode mode_from(const std::string& name) {
    if (name == "uniform") return DistractorMode::uniform;
    if (name == "perturbed") return DistractorMode::perturbed;
    if (name == "multiscale") return DistractorMode::multiscale;
    throw InvalidArgument("unknown distractor mode \"" + name + "\"");
}

void validate(const ExperimentConfig& c) {
    static const std::set<std::string> kinds{"random", "ergodic", "tied", "counterexample", "file"};
    if (!kinds.count(c.mdp.kind)) throw InvalidArgument("unknown mdp kind \"" + c.mdp.kind + "\"");
    if (c.mdp.kind == "file" && c.mdp.path.empty()) throw InvalidArgument("mdp kind \"file\" needs a path");
    if (c.mdp.kind == "counterexample" && c.mdp.instance != 1 && c.mdp.instance != 2)
        throw InvalidArgument("counterexample instance must be 1 or 2");
    if (c.data.mode != "behavior" && c.data.mode != "occupancy" && c.data.mode != "builtin")
        throw InvalidArgument("unknown data mode \"" + c.data.mode + "\"");
    if (c.data.mode == "builtin" && c.mdp.kind != "counterexample")
        throw InvalidArgument("data mode \"builtin\" is only defined for the counterexample");
    if (c.data.transitions_path.empty() != c.data.init_states_path.empty())
        throw InvalidArgument("transitions_path and init_states_path must be given together");
    if (!(c.alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
    if (c.alpha == 0.0 && c.data.mode != "behavior")
        throw InvalidArgument("alpha = 0 requires data mode \"behavior\" (dD must be a policy occupancy)");
    if (c.cap) {
        if (!(*c.cap > 0.0)) throw InvalidArgument("cap must be positive");
        if (c.alpha == 0.0) throw InvalidArgument("the capped variant needs alpha > 0");
        if (c.data.mode != "behavior") throw InvalidArgument("the capped variant requires data mode \"behavior\"");
    }
    if (c.classes.kind != "realizable" && c.classes.kind != "misspecified")
        throw InvalidArgument("unknown class kind \"" + c.classes.kind + "\"");
    if (c.classes.distractors < 0) throw InvalidArgument("distractors must be nonnegative");
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (c.n < 1 || c.n0 < 1) throw InvalidArgument("n and n0 must be at least 1");
    if (!(c.eps_ov >= 0.0 && c.eps_ow >= 0.0)) throw InvalidArgument("optimization slacks must be nonnegative");
    if (c.bc.enabled) {
        if (c.alpha == 0.0) throw InvalidArgument("behavior cloning needs alpha > 0");
        if (!(c.bc.split > 0.0 && c.bc.split < 1.0)) throw InvalidArgument("bc split must lie in (0, 1)");
        if (c.bc.policy_distractors < 0) throw InvalidArgument("policy_distractors must be nonnegative");
    }
    if (c.seeds < 1) throw InvalidArgument("seeds must be positive");
}

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

double expected_l1(const Occupancy& d, const Policy& a, const Policy& b) {
    return d.marginal().dot((a.probs - b.probs).cwiseAbs().rowwise().sum());
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    check_keys(j, "config", {"mdp", "data", "regularizer", "alpha", "cap", "classes", "n", "n0", "seed", "delta",
                             "eps_ov", "eps_ow", "bc", "n_grid", "seeds"});
    ExperimentConfig c;
    if (j.contains("mdp")) {
        const json& m = j["mdp"];
        check_keys(m, "mdp", {"kind", "num_states", "num_actions", "gamma", "mixing", "instance", "path", "seed"});
        read(m, "kind", c.mdp.kind);
        read(m, "num_states", c.mdp.num_states);
        read(m, "num_actions", c.mdp.num_actions);
        read(m, "gamma", c.mdp.gamma);
        read(m, "mixing", c.mdp.mixing);
        read(m, "instance", c.mdp.instance);
        read(m, "path", c.mdp.path);
        read(m, "seed", c.mdp.seed);
    }
    if (j.contains("data")) {
        const json& d = j["data"];
        check_keys(d, "data", {"mode", "floor", "seed", "transitions_path", "init_states_path"});
        read(d, "mode", c.data.mode);
        read(d, "floor", c.data.floor);
        read(d, "seed", c.data.seed);
        read(d, "transitions_path", c.data.transitions_path);
        read(d, "init_states_path", c.data.init_states_path);
    }
    if (j.contains("regularizer")) c.reg = io::regularizer_from_json(j["regularizer"].dump());
    read(j, "alpha", c.alpha);
    if (j.contains("cap") && !j["cap"].is_null()) c.cap = j["cap"].get<double>();
    if (j.contains("classes")) {
        const json& k = j["classes"];
        check_keys(k, "classes", {"kind", "distractors", "distractor_mode", "scale_max", "scale_min", "perturbation", "seed"});
        read(k, "kind", c.classes.kind);
        read(k, "distractors", c.classes.distractors);
        std::string mode = mode_name(c.classes.distractor_options.mode);
        read(k, "distractor_mode", mode);
        c.classes.distractor_options.mode = mode_from(mode);
        read(k, "scale_max", c.classes.distractor_options.scale_max);
        read(k, "scale_min", c.classes.distractor_options.scale_min);
        read(k, "perturbation", c.classes.perturbation);
        read(k, "seed", c.classes.seed);
    }
    read(j, "n", c.n);
    read(j, "n0", c.n0);
    read(j, "seed", c.seed);
    read(j, "delta", c.delta);
    read(j, "eps_ov", c.eps_ov);
    read(j, "eps_ow", c.eps_ow);
    if (j.contains("bc")) {
        const json& b = j["bc"];
        check_keys(b, "bc", {"enabled", "split", "policy_distractors", "seed"});
        read(b, "enabled", c.bc.enabled);
        read(b, "split", c.bc.split);
        read(b, "policy_distractors", c.bc.policy_distractors);
        read(b, "seed", c.bc.seed);
    }
    read(j, "n_grid", c.n_grid);
    read(j, "seeds", c.seeds);
    validate(c);
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["mdp"] = {{"kind", c.mdp.kind},         {"num_states", c.mdp.num_states}, {"num_actions", c.mdp.num_actions},
                {"gamma", c.mdp.gamma},       {"mixing", c.mdp.mixing},         {"instance", c.mdp.instance},
                {"path", c.mdp.path},         {"seed", c.mdp.seed}};
    j["data"] = {{"mode", c.data.mode},
                 {"floor", c.data.floor},
                 {"seed", c.data.seed},
                 {"transitions_path", c.data.transitions_path},
                 {"init_states_path", c.data.init_states_path}};
    j["regularizer"] = json::parse(io::regularizer_to_json(c.reg))["regularizer"];
    j["alpha"] = c.alpha;
    j["cap"] = c.cap ? json(*c.cap) : json(nullptr);
    j["classes"] = {{"kind", c.classes.kind},
                    {"distractors", c.classes.distractors},
                    {"distractor_mode", mode_name(c.classes.distractor_options.mode)},
                    {"scale_max", c.classes.distractor_options.scale_max},
                    {"scale_min", c.classes.distractor_options.scale_min},
                    {"perturbation", c.classes.perturbation},
                    {"seed", c.classes.seed}};
    j["n"] = c.n;
    j["n0"] = c.n0;
    j["seed"] = c.seed;
    j["delta"] = c.delta;
    j["eps_ov"] = c.eps_ov;
    j["eps_ow"] = c.eps_ow;
    j["bc"] = {{"enabled", c.bc.enabled},
               {"split", c.bc.split},
               {"policy_distractors", c.bc.policy_distractors},
               {"seed", c.bc.seed}};
    j["n_grid"] = c.n_grid;
    j["seeds"] = c.seeds;
    return j.dump(1) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
    json j = json::parse(config_to_json(config));
    j.erase("seed");
    j.erase("n");
    j.erase("n0");
    return fnv1a_hex(j.dump());
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TabularMdp build_mdp(const MdpSpec& spec) {
    if (spec.kind == "random") return random_mdp(spec.num_states, spec.num_actions, spec.gamma, spec.seed);
    if (spec.kind == "ergodic") return ergodic_mdp(spec.num_states, spec.num_actions, spec.gamma, spec.mixing, spec.seed);
    if (spec.kind == "tied") return tied_optimum_mdp(spec.gamma);
    if (spec.kind == "counterexample") return build_counterexample(spec.gamma, spec.instance).mdp;
    if (spec.kind == "file") return io::mdp_from_json(io::read_file(spec.path));
    throw InvalidArgument("unknown mdp kind \"" + spec.kind + "\"");
}

Occupancy build_data_distribution(const TabularMdp& mdp, const MdpSpec& mdp_spec, const DataSpec& spec) {
    const int S = mdp.num_states(), A = mdp.num_actions();
    if (spec.mode == "behavior")
        return behavior_occupancy(mdp, random_policy(S, A, spec.seed, spec.floor));
    if (spec.mode == "occupancy") {
        const Vector p = random_distribution(S * A, spec.seed, spec.floor);
        Matrix mass(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) mass(s, a) = p(s * A + a);
        return Occupancy(std::move(mass));
    }
    if (spec.mode == "builtin" && mdp_spec.kind == "counterexample")
        return build_counterexample(mdp_spec.gamma, mdp_spec.instance).data;
    throw InvalidArgument("data mode \"" + spec.mode + "\" is not available here");
}

Instance make_instance(TabularMdp mdp, Occupancy dD, Regularizer reg, double alpha, std::optional<double> cap) {
    if (!(alpha >= 0.0)) throw InvalidArgument("make_instance: alpha must be nonnegative");
    const UnregularizedSolution opt = solve_unregularized(mdp);
    Instance inst{std::move(mdp), std::move(dD), Policy(), std::move(reg), alpha, cap, {}, {}, {}, {}, 0.0, 0.0, {}};
    inst.behavior = behavior_policy(inst.dD);
    inst.j_star_0 = policy_return(inst.mdp, opt.pi);
    if (alpha > 0.0) {
        OracleOptions options;
        options.cap = cap;
        RegularizedSolution sol = solve_regularized(inst.mdp, inst.dD, inst.reg, alpha, options);
        inst.v_star = std::move(sol.v_star);
        inst.w_star = std::move(sol.w_star);
        inst.d_star = std::move(sol.d_star);
        inst.pi_star = std::move(sol.pi_star);
        inst.j_star_alpha = policy_return(inst.mdp, inst.pi_star);
        return inst;
    }
    if (cap) throw InvalidArgument("make_instance: a cap needs alpha > 0");
    const Concentrability conc = concentrability(opt.d, inst.dD);
    if (!conc.feasible) throw InfeasibleError(-1, "make_instance: dD does not cover the optimal occupancy");
    inst.v_star = opt.v;
    inst.w_star = Matrix::Zero(opt.d.mass.rows(), opt.d.mass.cols());
    for (Eigen::Index i = 0; i < inst.w_star.size(); ++i)
        if (inst.dD.mass(i) > 0.0) inst.w_star(i) = opt.d.mass(i) / inst.dD.mass(i);
    inst.d_star = opt.d;
    inst.pi_star = opt.pi;
    inst.j_star_alpha = inst.j_star_0;
    StrongConcentrabilityOptions sc;
    sc.allow_sampling = true;
    sc.max_enumeration = 1e5;
    inst.strong = strong_concentrability_check(inst.mdp, inst.dD, inst.d_star, sc);
    return inst;
}

FunctionClasses build_classes(const Instance& inst, const ClassSpec& spec) {
    if (spec.kind == "misspecified") {
        if (inst.alpha == 0.0) throw InvalidArgument("misspecified classes need alpha > 0");
        return build_misspecified(inst.mdp, inst.dD, inst.v_star, inst.w_star, spec.perturbation, spec.distractors,
                                  spec.seed, spec.distractor_options)
            .classes;
    }
    ClassBounds bounds;
    if (inst.alpha > 0.0) {
        bounds.b_w = inst.cap ? *inst.cap : inst.w_star.maxCoeff();
        bounds.b_v = (inst.alpha * inst.reg.bounds(bounds.b_w).b_fprime + 1.0) / (1.0 - inst.mdp.gamma());
    } else {
        bounds.b_w = inst.w_star.maxCoeff();
        bounds.b_v = 1.0 / (1.0 - inst.mdp.gamma());
        bounds.nonnegative_values = true;
        bounds.floor = WeightFloor{inst.d_star.marginal().cwiseQuotient(inst.dD.marginal()).minCoeff(), inst.behavior};
    }
    return build_realizable(inst.v_star, inst.w_star, inst.dD, bounds, spec.distractors, spec.seed,
                            spec.distractor_options);
}

PolicyClass build_policy_class(const Instance& inst, const BcSpec& spec) {
    PolicyClass out{{inst.pi_star}};
    const int S = inst.mdp.num_states(), A = inst.mdp.num_actions();
    for (int k = 0; k < spec.policy_distractors; ++k) {
        const Policy other = random_policy(S, A, mix_seed(spec.seed, static_cast<std::uint64_t>(k)));
        const double t = 0.5 * (k + 1.0) / spec.policy_distractors;
        out.members.emplace_back((1.0 - t) * inst.pi_star.probs + t * other.probs);
    }
    return out;
}

std::uint64_t dataset_seed(std::uint64_t seed) { return mix_seed(seed, 0xda7a); }

RunReport run_pipeline(const Instance& inst, const FunctionClasses& classes, const OfflineDataset& data,
                       const PipelineOptions& options) {
    const TabularMdp& mdp = inst.mdp;
    RunReport r;
    r.alpha = inst.alpha;
    r.v_size = classes.values.members.size();
    r.w_size = classes.weights.members.size();

    OfflineDataset weight_data = data;
    OfflineDataset clone_data;
    if (options.policies) {
        const auto n1 = static_cast<std::size_t>(std::floor(options.bc_split * static_cast<double>(data.n())));
        std::tie(weight_data, clone_data) = stage("data", [&] { return split_dataset(data, n1); });
    }
    r.n = weight_data.n();
    r.n0 = weight_data.n0();

    const Matrix empirical = stage("saddle", [&] {
        return empirical_payoffs(EmpiricalModel(weight_data), classes.values, classes.weights, inst.reg, inst.alpha);
    });
    const Matrix population = stage("saddle", [&] {
        return population_payoffs(mdp, inst.dD, classes.values, classes.weights, inst.reg, inst.alpha);
    });
    r.max_deviation = (empirical - population).cwiseAbs().maxCoeff();
    r.saddle = stage("saddle", [&] {
        return solve_inexact(empirical, classes.values, classes.weights, options.eps_ov, options.eps_ow, options.seed);
    });
    r.pi_hat = stage("extraction", [&] { return extract_policy(r.saddle.w_hat, inst.behavior).policy; });

    stage("evaluation", [&] {
        r.j_hat = policy_return(mdp, r.pi_hat);
        r.j_star_alpha = inst.j_star_alpha;
        r.j_star_0 = inst.j_star_0;
        r.realized_gap = r.j_star_alpha - r.j_hat;
        r.gap_to_optimal = r.j_star_0 - r.j_hat;
        r.policy_l1 = expected_l1(inst.d_star, inst.pi_star, r.pi_hat);
        r.w_error = weighted_l2(r.saddle.w_hat - inst.w_star, inst.dD.mass);

        BoundReport& b = r.bounds;
        b.alpha = inst.alpha;
        b.gamma = mdp.gamma();
        b.n = r.n;
        b.n0 = r.n0;
        b.delta = options.delta;
        b.b_w = classes.weights.bound;
        b.b_v = classes.values.bound;
        b.b_e = residual_bound(b.b_v, b.gamma);
        const RegularizerBounds rb = inst.reg.bounds(b.b_w);
        b.b_f = rb.b_f;
        b.b_fprime = rb.b_fprime;
        b.m_f = inst.reg.strong_convexity();
        StatErrorInputs in{std::max<std::size_t>(r.n, 1), std::max<std::size_t>(r.n0, 1), b.alpha, b.gamma, b.b_w,
                           b.b_f, b.b_v, b.b_e, r.v_size, r.w_size, b.delta};
        b.eps_stat = stat_error(in);

        const ApproximationErrors app = approximation_errors(mdp, inst.dD, inst.v_star, inst.w_star,
                                                             classes.values.members, classes.weights.members);
        r.eps_app = approximation_error(app.eps_rv, app.eps_rw, b.b_w, b.b_e, b.alpha, b.b_fprime);
        const double eps_opt = r.saddle.eps_ov + r.saddle.eps_ow;
        if (inst.alpha > 0.0) {
            b.rhs_theorem1 = robust_rhs(b.eps_stat, eps_opt, r.eps_app, b.alpha, b.m_f, b.gamma);
            r.rhs_realized = robust_rhs(r.max_deviation, eps_opt, r.eps_app, b.alpha, b.m_f, b.gamma);
            r.rhs_alpha_zero = kNan;
        } else {
            b.rhs_theorem1 = kNan;
            r.rhs_realized = kNan;
            r.rhs_alpha_zero = inst.strong && inst.strong->holds
                                   ? alpha_zero_rhs(b.b_w, inst.strong->b_wu, inst.strong->b_wl, b.gamma, in.n, in.n0,
                                                    r.v_size, r.w_size, b.delta)
                                   : kNan;
        }
    });

    if (options.policies) {
        const CloneResult clone =
            stage("extraction", [&] { return clone_policy(r.saddle.w_hat, clone_data, *options.policies); });
        stage("evaluation", [&] {
            BcReport bc;
            bc.n1 = weight_data.n();
            bc.n2 = clone_data.n();
            bc.clone_index = clone.index;
            bc.policy_l1 = expected_l1(inst.d_star, inst.pi_star, clone.policy);
            bc.j_bar = policy_return(mdp, clone.policy);
            const std::size_t count = options.policies->members.size();
            bc.cloning_term = cloning_term(r.bounds.b_w, bc.n2, count, options.delta);
            bc.rhs = cloning_rhs(r.bounds.b_w, bc.n2, count, options.delta, r.bounds.eps_stat, inst.alpha, r.bounds.m_f);
            r.bounds.rhs_cloning = bc.rhs;
            r.bc = bc;
        });
    }
    return r;
}

namespace {

struct Prepared {
    Instance instance;
    FunctionClasses classes;
    OfflineDataset data;
};

Prepared prepare(const ExperimentConfig& c) {
    validate(c);
    TabularMdp mdp = stage("mdp", [&] { return build_mdp(c.mdp); });
    Occupancy dD = stage("data", [&] { return build_data_distribution(mdp, c.mdp, c.data); });
    Instance inst = stage("oracle", [&] { return make_instance(std::move(mdp), std::move(dD), c.reg, c.alpha, c.cap); });
    FunctionClasses classes = stage("classes", [&] { return build_classes(inst, c.classes); });
    OfflineDataset data = stage("data", [&] {
        if (c.data.transitions_path.empty())
            return generate_dataset(inst.mdp, inst.dD, c.n, c.n0, dataset_seed(c.seed));
        OfflineDataset d = io::dataset_from_jsonl(io::read_file(c.data.transitions_path),
                                                  io::read_file(c.data.init_states_path), inst.mdp.num_states(),
                                                  inst.mdp.num_actions(), inst.mdp.gamma());
        d.generating_dD = inst.dD;
        return d;
    });
    return {std::move(inst), std::move(classes), std::move(data)};
}

}  // namespace

RunReport run_pro_rl(const ExperimentConfig& config) {
    const Prepared p = prepare(config);
    PipelineOptions options;
    options.delta = config.delta;
    options.eps_ov = config.eps_ov;
    options.eps_ow = config.eps_ow;
    options.seed = mix_seed(config.seed, 0x5add1e);
    RunReport r = run_pipeline(p.instance, p.classes, p.data, options);
    r.seed = config.seed;
    return r;
}

RunReport run_pro_rl_bc(const ExperimentConfig& config) {
    if (!config.bc.enabled) throw PipelineError("config", "run_pro_rl_bc needs bc.enabled");
    const Prepared p = prepare(config);
    PipelineOptions options;
    options.delta = config.delta;
    options.eps_ov = config.eps_ov;
    options.eps_ow = config.eps_ow;
    options.seed = mix_seed(config.seed, 0x5add1e);
    options.policies = stage("classes", [&] { return build_policy_class(p.instance, config.bc); });
    options.bc_split = config.bc.split;
    RunReport r = run_pipeline(p.instance, p.classes, p.data, options);
    r.seed = config.seed;
    return r;
}

std::vector<std::string> report_header() {
    return {"config_hash",  "seed",           "n",         "n0",           "alpha",       "v_size",
            "w_size",       "w_index",        "v_index",   "j_hat",        "j_star_alpha", "j_star_0",
            "realized_gap", "gap_to_optimal", "policy_l1", "w_error",      "max_deviation", "eps_stat",
            "rhs_theorem1", "rhs_realized",   "rhs_alpha_zero", "eps_app", "eps_opt",      "bc_policy_l1",
            "bc_cloning_term", "bc_rhs"};
}

std::vector<std::string> report_row(const std::string& hash, const RunReport& r) {
    using io::format_number;
    auto count = [](std::size_t x) { return std::to_string(x); };
    return {hash,
            count(r.seed),
            count(r.n),
            count(r.n0),
            format_number(r.alpha),
            count(r.v_size),
            count(r.w_size),
            count(r.saddle.w_index),
            count(r.saddle.v_index),
            format_number(r.j_hat),
            format_number(r.j_star_alpha),
            format_number(r.j_star_0),
            format_number(r.realized_gap),
            format_number(r.gap_to_optimal),
            format_number(r.policy_l1),
            format_number(r.w_error),
            format_number(r.max_deviation),
            format_number(r.bounds.eps_stat),
            format_number(r.bounds.rhs_theorem1),
            format_number(r.rhs_realized),
            format_number(r.rhs_alpha_zero),
            format_number(r.eps_app),
            format_number(r.saddle.eps_ov + r.saddle.eps_ow),
            format_number(r.bc ? r.bc->policy_l1 : kNan),
            format_number(r.bc ? r.bc->cloning_term : kNan),
            format_number(r.bc ? r.bc->rhs : kNan)};
}

}  // namespace prorl
