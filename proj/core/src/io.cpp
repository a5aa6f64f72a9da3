#include "prorl/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prorl/error.hpp"

namespace prorl::io {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string(what) + ": " + e.what());
    }
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("field \"") + key + "\": " + e.what());
    }
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
    return out;
}

Vector vector_from(const json& j) {
    if (!j.is_array()) throw InvalidArgument("expected a numeric array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Matrix matrix_from(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidArgument("expected a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InvalidArgument("ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json regularizer_json(const Regularizer& reg) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Quadratic>)
                return {{"kind", "quadratic"}, {"m_f", k.m_f}};
            else
                return {{"kind", "shifted_quadratic"}, {"m_f", k.m_f}, {"shift", k.shift}};
        },
        reg.kind());
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << contents;
    if (!out) throw Error("write failed: " + path);
}

std::string mdp_to_json(const TabularMdp& mdp) {
    const int S = mdp.num_states(), A = mdp.num_actions();
    json transition = json::array();
    for (int s = 0; s < S; ++s) {
        json per_action = json::array();
        for (int a = 0; a < A; ++a) per_action.push_back(vector_json(mdp.transition().row(mdp.cell(s, a)).transpose()));
        transition.push_back(per_action);
    }
    json j = {{"num_states", S},
              {"num_actions", A},
              {"gamma", mdp.gamma()},
              {"transition", transition},
              {"reward", matrix_json(mdp.reward())},
              {"init_dist", vector_json(mdp.init_dist())}};
    if (mdp.init_support() == TabularMdp::InitSupport::allow_zero) j["allow_zero_init"] = true;
    return j.dump(1) + "\n";
}

TabularMdp mdp_from_json(const std::string& text) {
    const json j = parse(text, "mdp json");
    const int S = field<int>(j, "num_states");
    const int A = field<int>(j, "num_actions");
    if (S <= 0 || A <= 0) throw InvalidArgument("num_states and num_actions must be positive");
    const json& t = j.at("transition");
    if (!t.is_array() || static_cast<int>(t.size()) != S) throw InvalidArgument("transition must have num_states entries");
    Matrix P(S * A, S);
    for (int s = 0; s < S; ++s) {
        if (!t[s].is_array() || static_cast<int>(t[s].size()) != A)
            throw InvalidArgument("transition[" + std::to_string(s) + "] must have num_actions entries");
        for (int a = 0; a < A; ++a) {
            const Vector row = vector_from(t[s][a]);
            if (row.size() != S) throw InvalidArgument("transition row length must equal num_states");
            P.row(s * A + a) = row.transpose();
        }
    }
    Matrix r = matrix_from(j.at("reward"));
    if (r.rows() != S || r.cols() != A) throw InvalidArgument("reward must be num_states x num_actions");
    Vector mu0 = vector_from(j.at("init_dist"));
    if (mu0.size() != S) throw InvalidArgument("init_dist length must equal num_states");
    const auto support = j.value("allow_zero_init", false) ? TabularMdp::InitSupport::allow_zero
                                                           : TabularMdp::InitSupport::strict;
    return TabularMdp(S, A, field<double>(j, "gamma"), std::move(P), std::move(r), std::move(mu0), support);
}

Regularizer regularizer_from_json(const std::string& text) {
    json j = parse(text, "regularizer json");
    if (j.contains("regularizer")) j = j.at("regularizer");
    const auto kind = field<std::string>(j, "kind");
    const double m_f = field<double>(j, "m_f");
    if (!(m_f > 0.0)) throw InvalidArgument("m_f must be positive");
    if (kind == "quadratic") return Regularizer::quadratic(m_f);
    if (kind == "shifted_quadratic") return Regularizer::shifted_quadratic(m_f, field<double>(j, "shift"));
    throw InvalidArgument("unknown regularizer kind \"" + kind + "\"");
}

std::string regularizer_to_json(const Regularizer& reg) { return json{{"regularizer", regularizer_json(reg)}}.dump(); }

std::string transitions_to_jsonl(const OfflineDataset& data) {
    std::string out;
    char buf[128];
    for (const Transition& t : data.transitions) {
        std::snprintf(buf, sizeof buf, "{\"s\":%d,\"a\":%d,\"r\":%.17g,\"sp\":%d}\n", t.s, t.a, t.r, t.sp);
        out += buf;
    }
    return out;
}

std::string init_states_to_jsonl(const OfflineDataset& data) {
    std::string out;
    for (int s : data.init_states) out += "{\"s0\":" + std::to_string(s) + "}\n";
    return out;
}

OfflineDataset dataset_from_jsonl(const std::string& transitions, const std::string& init_states, int num_states,
                                  int num_actions, double gamma) {
    OfflineDataset data;
    data.num_states = num_states;
    data.num_actions = num_actions;
    data.gamma = gamma;
    auto check_state = [&](int s, std::size_t line) {
        if (s < 0 || s >= num_states)
            throw InvalidArgument("dataset line " + std::to_string(line) + ": state out of range");
    };
    std::istringstream tin(transitions);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(tin, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json j = parse(line, "dataset line");
        Transition t{field<int>(j, "s"), field<int>(j, "a"), field<double>(j, "r"), field<int>(j, "sp")};
        check_state(t.s, lineno);
        check_state(t.sp, lineno);
        if (t.a < 0 || t.a >= num_actions)
            throw InvalidArgument("dataset line " + std::to_string(lineno) + ": action out of range");
        data.transitions.push_back(t);
    }
    std::istringstream iin(init_states);
    lineno = 0;
    while (std::getline(iin, line)) {
        ++lineno;
        if (line.empty()) continue;
        const int s = field<int>(parse(line, "init-state line"), "s0");
        check_state(s, lineno);
        data.init_states.push_back(s);
    }
    return data;
}

std::string occupancy_to_json(const Occupancy& occ) { return json{{"occupancy", matrix_json(occ.mass)}}.dump() + "\n"; }

Occupancy occupancy_from_json(const std::string& text) {
    const json j = parse(text, "occupancy json");
    return Occupancy(matrix_from(j.at("occupancy")));
}

std::string policy_to_json(const Policy& policy) { return json{{"policy", matrix_json(policy.probs)}}.dump() + "\n"; }

Policy policy_from_json(const std::string& text) {
    const json j = parse(text, "policy json");
    return Policy(matrix_from(j.at("policy")));
}

std::string classes_to_json(const FunctionClasses& classes) {
    json values = json::array();
    for (const Vector& v : classes.values.members) values.push_back(vector_json(v));
    json weights = json::array();
    for (const Matrix& w : classes.weights.members) weights.push_back(matrix_json(w));
    json w = {{"bound", classes.weights.bound}, {"members", weights}};
    if (classes.weights.floor)
        w["floor"] = {{"b_wl", classes.weights.floor->b_wl}, {"behavior", matrix_json(classes.weights.floor->behavior.probs)}};
    json j = {{"values", {{"bound", classes.values.bound}, {"nonnegative", classes.values.nonnegative}, {"members", values}}},
              {"weights", w}};
    return j.dump() + "\n";
}

FunctionClasses classes_from_json(const std::string& text) {
    const json j = parse(text, "classes json");
    const json& jv = j.at("values");
    const json& jw = j.at("weights");
    std::vector<Vector> values;
    for (const json& m : jv.at("members")) values.push_back(vector_from(m));
    std::vector<Matrix> weights;
    for (const json& m : jw.at("members")) weights.push_back(matrix_from(m));
    std::optional<WeightFloor> floor;
    if (jw.contains("floor"))
        floor = WeightFloor{field<double>(jw.at("floor"), "b_wl"), Policy(matrix_from(jw.at("floor").at("behavior")))};
    FunctionClasses out;
    // Declared bounds are enforced: out-of-box members are an input error.
    out.values = make_value_class(values, field<double>(jv, "bound"), jv.value("nonnegative", false), BoundAction::reject);
    out.weights = make_weight_class(weights, field<double>(jw, "bound"), floor, BoundAction::reject);
    if (out.values.audit.rejected || out.weights.audit.rejected)
        throw InvalidArgument("classes json: members violate the declared bounds");
    if (out.values.members.empty() || out.weights.members.empty()) throw InvalidArgument("classes json: empty class");
    return out;
}

std::string policy_class_to_json(const PolicyClass& policies) {
    json members = json::array();
    for (const Policy& p : policies.members) members.push_back(matrix_json(p.probs));
    return json{{"policies", members}}.dump() + "\n";
}

PolicyClass policy_class_from_json(const std::string& text) {
    const json j = parse(text, "policy class json");
    PolicyClass out;
    for (const json& m : j.at("policies")) out.members.emplace_back(matrix_from(m));
    if (out.members.empty()) throw InvalidArgument("policy class json: empty class");
    return out;
}

std::string solution_to_json(const RegularizedSolution& solution) {
    json j = {{"alpha", solution.alpha},
              {"v_star", vector_json(solution.v_star)},
              {"w_star", matrix_json(solution.w_star)},
              {"pi_star", matrix_json(solution.pi_star.probs)},
              {"kkt_residual", solution.kkt_residual},
              {"iterations", solution.iterations},
              {"solver", solution.path == SolverPath::dual_newton ? "dual_newton" : "extragradient"},
              {"nonunique_states", solution.nonunique_states}};
    j["cap"] = solution.cap ? json(*solution.cap) : json(nullptr);
    return j.dump(1) + "\n";
}

std::string saddle_to_json(const SaddleSolution& solution) {
    json j = {{"w_index", solution.w_index},     {"v_index", solution.v_index}, {"value", solution.value},
              {"eps_ov", solution.eps_ov},       {"eps_ow", solution.eps_ow},   {"v_hat", vector_json(solution.v_hat)},
              {"w_hat", matrix_json(solution.w_hat)}};
    return j.dump(1) + "\n";
}

Matrix weights_from_saddle_json(const std::string& text) {
    const json j = parse(text, "saddle json");
    return matrix_from(j.at("w_hat"));
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw InvalidArgument("csv header must not be empty");
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw InvalidArgument("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(header_.size()));
    rows_.push_back(std::move(cells));
}

std::string CsvTable::to_string() const {
    auto join = [](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        return line + "\n";
    };
    std::string out = join(header_);
    for (const auto& row : rows_) out += join(row);
    return out;
}

}  // namespace prorl::io
