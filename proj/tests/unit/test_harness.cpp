#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "helpers.hpp"
#include "prorl/dataset.hpp"
#include "prorl/error.hpp"
#include "prorl/generators.hpp"
#include "prorl/harness.hpp"
#include "prorl/io.hpp"
#include "prorl/oracle.hpp"
#include "prorl/stats.hpp"
#include "prorl/svg.hpp"

using namespace prorl;
using namespace prorl::test;

TEST_CASE("dataset generation") {
    const TabularMdp mdp = random_mdp(3, 2, 0.9, 501);
    const Occupancy dD = behavior_occupancy(mdp, random_policy(3, 2, 502, 0.1));
    const OfflineDataset empty = generate_dataset(mdp, dD, 0, 0, 1);
    CHECK(empty.n() == 0);
    CHECK(empty.n0() == 0);

    const std::size_t n = 1000000;
    const OfflineDataset data = generate_dataset(mdp, dD, n, 10, 503);
    Matrix freq = Matrix::Zero(3, 2);
    for (const Transition& t : data.transitions) {
        freq(t.s, t.a) += 1.0 / n;
        CHECK_MESSAGE(t.r == mdp.reward()(t.s, t.a), "reward must match the source MDP");
    }
    for (Eigen::Index i = 0; i < freq.size(); ++i)
        CHECK(std::abs(freq(i) - dD.mass(i)) <= 3.0 * std::sqrt(dD.mass(i) * (1.0 - dD.mass(i)) / n));

    const OfflineDataset a = generate_dataset(mdp, dD, 500, 50, 9), b = generate_dataset(mdp, dD, 500, 50, 9);
    CHECK(io::transitions_to_jsonl(a) == io::transitions_to_jsonl(b));
    CHECK(io::init_states_to_jsonl(a) == io::init_states_to_jsonl(b));
    CHECK(io::transitions_to_jsonl(a) != io::transitions_to_jsonl(generate_dataset(mdp, dD, 500, 50, 10)));

    const double weights[] = {0.0, 0.5, 0.0, 0.5};
    CHECK(sample_categorical(weights, 4, 0.0) == 1);
    CHECK(sample_categorical(weights, 4, 0.49) == 1);
    CHECK(sample_categorical(weights, 4, 0.51) == 3);
}

TEST_CASE("serialization round trips") {
    const TabularMdp mdp = random_mdp(3, 2, 0.85, 511);
    const TabularMdp back = io::mdp_from_json(io::mdp_to_json(mdp));
    CHECK(back.transition() == mdp.transition());
    CHECK(back.reward() == mdp.reward());
    CHECK(back.init_dist() == mdp.init_dist());
    CHECK(back.gamma() == mdp.gamma());

    const Occupancy dD = behavior_occupancy(mdp, random_policy(3, 2, 512, 0.1));
    const OfflineDataset data = generate_dataset(mdp, dD, 200, 20, 513);
    const OfflineDataset read = io::dataset_from_jsonl(io::transitions_to_jsonl(data), io::init_states_to_jsonl(data),
                                                       3, 2, mdp.gamma());
    REQUIRE(read.n() == 200);
    for (std::size_t i = 0; i < 200; ++i) {
        CHECK(read.transitions[i].r == data.transitions[i].r);
        CHECK(read.transitions[i].sp == data.transitions[i].sp);
    }
    CHECK(read.init_states == data.init_states);
    CHECK_THROWS_AS(io::dataset_from_jsonl("{\"s\":7,\"a\":0,\"r\":0.5,\"sp\":0}\n", "", 3, 2, 0.9), InvalidArgument);

    CHECK(io::occupancy_from_json(io::occupancy_to_json(dD)).mass == dD.mass);
    const Policy pi = random_policy(3, 2, 514);
    CHECK(io::policy_from_json(io::policy_to_json(pi)).probs == pi.probs);

    const Regularizer reg = io::regularizer_from_json(R"({"regularizer":{"kind":"quadratic","m_f":2.0}})");
    CHECK(reg.eval(3.0) == 9.0);
    CHECK(io::regularizer_from_json(io::regularizer_to_json(reg)).eval(1.5) == reg.eval(1.5));

    const RegularizedSolution sol = solve_regularized(mdp, dD, Regularizer::quadratic(1.0), 0.3);
    Instance inst = make_instance(mdp, dD, Regularizer::quadratic(1.0), 0.3);
    const FunctionClasses classes = build_classes(inst, ClassSpec{});
    const FunctionClasses k = io::classes_from_json(io::classes_to_json(classes));
    REQUIRE(k.values.members.size() == classes.values.members.size());
    CHECK(k.values.members[3] == classes.values.members[3]);
    CHECK(k.weights.members[5] == classes.weights.members[5]);
    CHECK(k.weights.bound == classes.weights.bound);
    CHECK(io::solution_to_json(sol).find("\"kkt_residual\"") != std::string::npos);

    io::CsvTable table({"a", "b"});
    table.add_row({"1", "2"});
    CHECK(table.to_string() == "a,b\n1,2\n");
    CHECK_THROWS_AS(table.add_row({"1"}), InvalidArgument);
}

TEST_CASE("config parsing") {
    const ExperimentConfig def = parse_config("{}");
    CHECK(def.alpha == 0.1);
    CHECK(def.delta == 0.1);
    CHECK(def.seeds == 20);

    const ExperimentConfig c = parse_config(
        R"({"mdp":{"kind":"ergodic","num_states":4,"num_actions":2,"mixing":0.4},"alpha":0.2,"cap":3.0,
            "regularizer":{"kind":"quadratic","m_f":2.0},"n_grid":[100,1000],"seed":7})");
    CHECK(c.mdp.kind == "ergodic");
    CHECK(c.cap == 3.0);
    CHECK(c.n_grid == std::vector<std::size_t>{100, 1000});
    const ExperimentConfig again = parse_config(config_to_json(c));
    CHECK(config_to_json(again) == config_to_json(c));

    ExperimentConfig other_seed = c;
    other_seed.seed = 99;
    other_seed.n = 12345;
    CHECK(config_hash(other_seed) == config_hash(c));
    other_seed.alpha = 0.25;
    CHECK(config_hash(other_seed) != config_hash(c));
    CHECK(fnv1a_hex("").size() == 16);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");

    CHECK_THROWS_AS(parse_config(R"({"alpah":0.1})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"mdp":{"kind":"spiral"}})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"alpha":0.0,"data":{"mode":"occupancy"}})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config(R"({"data":{"mode":"builtin"}})"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("{not json"), InvalidArgument);
}

TEST_CASE("end-to-end runs") {
    SUBCASE("singleton classes recover the target") {
        ExperimentConfig c;
        c.mdp.num_states = 5;
        c.classes.distractors = 0;
        c.n = c.n0 = 50;
        const RunReport r = run_pro_rl(c);
        CHECK(r.w_error == 0.0);
        CHECK(std::abs(r.realized_gap) < 1e-12);
        CHECK(r.policy_l1 < 1e-12);
    }
    SUBCASE("inequality chain holds on every run") {
        ExperimentConfig c;
        c.mdp.num_states = 6;
        c.alpha = 0.3;
        for (std::size_t n : {100, 1000, 10000})
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                c.n = c.n0 = n;
                c.seed = seed;
                const RunReport r = run_pro_rl(c);
                const double scale = 1.0 / (1.0 - c.mdp.gamma);
                CHECK(r.realized_gap <= scale * r.policy_l1 + 1e-10);
                CHECK(scale * r.policy_l1 <= 2.0 * scale * r.w_error + 1e-10);
                CHECK(r.realized_gap <= r.rhs_realized + 1e-10);
                CHECK(r.bounds.eps_stat > 0.0);
                CHECK(report_row("h", r).size() == report_header().size());
            }
    }
    SUBCASE("counterexample with alpha = 0 and adversarial data") {
        ExperimentConfig c = parse_config(
            R"({"mdp":{"kind":"counterexample","instance":2},"data":{"mode":"builtin"},"alpha":0.1,"n":2000,"n0":2000})");
        const RunReport r = run_pro_rl(c);
        CHECK(r.realized_gap <= r.rhs_realized + 1e-10);
    }
    SUBCASE("behavior cloning variant") {
        ExperimentConfig c;
        c.mdp.num_states = 5;
        c.alpha = 0.3;
        c.bc.enabled = true;
        c.n = c.n0 = 5000;
        const RunReport r = run_pro_rl_bc(c);
        REQUIRE(r.bc.has_value());
        CHECK(r.bc->n1 + r.bc->n2 == 5000);
        CHECK(r.bc->policy_l1 >= 0.0);
    }
    SUBCASE("stage errors name the stage") {
        ExperimentConfig c;
        c.mdp.kind = "file";
        c.mdp.path = "/nonexistent/mdp.json";
        try {
            run_pro_rl(c);
            FAIL("expected a pipeline error");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == "mdp");
        }
    }
}

TEST_CASE("run reports are reproducible") {
    ExperimentConfig c;
    c.mdp.num_states = 4;
    c.n = c.n0 = 300;
    c.seed = 17;
    const std::string hash = config_hash(c);
    CHECK(report_row(hash, run_pro_rl(c)) == report_row(hash, run_pro_rl(c)));
}

TEST_CASE("statistics helpers") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), InvalidArgument);

    const LineFit exact = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(exact.slope == doctest::Approx(2.0));
    CHECK(exact.intercept == doctest::Approx(1.0));
    CHECK(exact.r_squared == doctest::Approx(1.0));
    const LineFit loglog = fit_loglog({10, 100, 1000}, {1.0, 0.1, 0.01});
    CHECK(loglog.slope == doctest::Approx(-1.0));
    CHECK_THROWS_AS(fit_loglog({1, 2}, {1, 0}), InvalidArgument);

    // Quantile agrees with a direct CDF scan.
    for (double p : {0.05, 0.1, 0.3})
        for (std::size_t n : {20, 200}) {
            double cdf = 0.0, pmf = std::pow(1.0 - p, static_cast<double>(n));
            std::size_t k = 0;
            for (;; ++k) {
                cdf += pmf;
                if (cdf >= 0.99) break;
                pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * p / (1.0 - p);
            }
            CHECK(binomial_quantile(n, p, 0.99) == k);
        }
    CHECK(t_quantile_975(1) == doctest::Approx(12.706).epsilon(1e-3));
    CHECK(t_quantile_975(2) == doctest::Approx(4.303).epsilon(1e-3));
    CHECK(t_quantile_975(30) == doctest::Approx(2.042).epsilon(1e-3));
}

TEST_CASE("svg charts") {
    ChartOptions o;
    o.title = "gap <vs> n";
    o.log_x = o.log_y = true;
    const std::vector<Series> s{{"median", {100, 1000, 10000}, {0.3, 0.1, 0.03}}, {"skip", {1, 10}, {0.0, -1.0}}};
    const std::string svg = render_line_chart(s, o);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("gap &lt;vs&gt; n") != std::string::npos);
    CHECK(svg == render_line_chart(s, o));
}
