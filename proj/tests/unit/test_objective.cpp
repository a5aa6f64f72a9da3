#include <doctest.h>

#include "helpers.hpp"
#include "prorl/counterexample.hpp"
#include "prorl/dataset.hpp"
#include "prorl/generators.hpp"
#include "prorl/objective.hpp"
#include "prorl/oracle.hpp"

using namespace prorl;
using namespace prorl::test;

namespace {

// Term-by-term evaluation straight from the definition.
double brute_lagrangian(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg, double alpha,
                        const Vector& v, const Matrix& w) {
    const int S = mdp.num_states(), A = mdp.num_actions();
    double total = 0.0;
    for (int s = 0; s < S; ++s) total += (1.0 - mdp.gamma()) * mdp.init_dist()(s) * v(s);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            if (dD.mass(s, a) == 0.0) continue;
            double next = 0.0;
            for (int sp = 0; sp < S; ++sp) next += mdp.prob(s, a, sp) * v(sp);
            const double e = mdp.reward()(s, a) + mdp.gamma() * next - v(s);
            total += dD.mass(s, a) * (w(s, a) * e - alpha * reg.eval(w(s, a)));
        }
    return total;
}

Vector random_vector(int n, Rng& rng, double scale) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(-scale, scale);
    return v;
}

Matrix random_weights(int S, int A, Rng& rng, double scale) {
    Matrix w(S, A);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(0.0, scale);
    return w;
}

}  // namespace

TEST_CASE("population Lagrangian") {
    const TabularMdp mdp = random_mdp(5, 3, 0.9, 31);
    const Occupancy dD = behavior_occupancy(mdp, random_policy(5, 3, 32, 0.1));
    const Regularizer reg = Regularizer::quadratic(1.0);
    Rng rng(33);
    const Vector v = random_vector(5, rng, 4.0);
    CHECK(population_lagrangian(mdp, dD, reg, 0.0, v, Matrix::Zero(5, 3)) ==
          doctest::Approx((1.0 - mdp.gamma()) * mdp.init_dist().dot(v)).epsilon(1e-14));
    for (int i = 0; i < 20; ++i) {
        const Vector vi = random_vector(5, rng, 4.0);
        const Matrix wi = random_weights(5, 3, rng, 3.0);
        CHECK(std::abs(population_lagrangian(mdp, dD, reg, 0.3, vi, wi) - brute_lagrangian(mdp, dD, reg, 0.3, vi, wi)) <
              1e-12);
    }
}

TEST_CASE("counterexample weights tie at alpha = 0") {
    for (int instance : {1, 2}) {
        const CounterexampleBundle b = build_counterexample(0.9, instance);
        const Regularizer reg = Regularizer::quadratic(1.0);
        const double l1 = population_lagrangian(b.mdp, b.data, reg, 0.0, b.v0, b.w1);
        const double l2 = population_lagrangian(b.mdp, b.data, reg, 0.0, b.v0, b.w2);
        CHECK(std::abs(l1 - l2) < 1e-12);
    }
}

TEST_CASE("Lagrangian structure") {
    const TabularMdp mdp = random_mdp(4, 3, 0.8, 41);
    const Occupancy dD = behavior_occupancy(mdp, random_policy(4, 3, 42, 0.1));
    const Regularizer reg = Regularizer::quadratic(1.7);
    const double alpha = 0.4;
    Rng rng(43);
    for (int i = 0; i < 100; ++i) {
        const Vector v = random_vector(4, rng, 5.0);
        const Matrix w1 = random_weights(4, 3, rng, 4.0), w2 = random_weights(4, 3, rng, 4.0);
        const double mid = population_lagrangian(mdp, dD, reg, alpha, v, 0.5 * (w1 + w2));
        const double avg = 0.5 * (population_lagrangian(mdp, dD, reg, alpha, v, w1) +
                                  population_lagrangian(mdp, dD, reg, alpha, v, w2));
        const double gap = weighted_l2(w1 - w2, dD.mass);
        CHECK(mid >= avg + alpha * reg.strong_convexity() / 8.0 * gap * gap - 1e-10);

        const Vector v2 = random_vector(4, rng, 5.0);
        const double lhs = population_lagrangian(mdp, dD, reg, alpha, v + v2, w1) +
                           population_lagrangian(mdp, dD, reg, alpha, Vector::Zero(4), w1);
        const double rhs = population_lagrangian(mdp, dD, reg, alpha, v, w1) +
                           population_lagrangian(mdp, dD, reg, alpha, v2, w1);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("empirical Lagrangian") {
    OfflineDataset one;
    one.num_states = 2;
    one.num_actions = 1;
    one.gamma = 0.9;
    one.transitions = {{0, 0, 0.7, 1}};
    one.init_states = {0};
    const Regularizer reg = Regularizer::quadratic(1.0);
    CHECK(empirical_lagrangian(one, reg, 0.5, Vector::Zero(2), Matrix::Zero(2, 1)) == 0.0);

    SUBCASE("exact frequencies reproduce the population value") {
        // Deterministic MDP, uniform dD and mu0: one transition per cell and one initial state per state.
        const int S = 3, A = 2;
        Matrix p = Matrix::Zero(S * A, S);
        Matrix r(S, A);
        Rng rng(51);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                p(s * A + a, (s + a + 1) % S) = 1.0;
                r(s, a) = rng.uniform();
            }
        const TabularMdp mdp(S, A, 0.85, p, r, Vector::Constant(S, 1.0 / S));
        const Occupancy dD(Matrix::Constant(S, A, 1.0 / (S * A)));
        OfflineDataset data;
        data.num_states = S;
        data.num_actions = A;
        data.gamma = mdp.gamma();
        for (int s = 0; s < S; ++s) {
            data.init_states.push_back(s);
            for (int a = 0; a < A; ++a) data.transitions.push_back({s, a, r(s, a), (s + a + 1) % S});
        }
        const Vector v = random_vector(S, rng, 3.0);
        const Matrix w = random_weights(S, A, rng, 2.0);
        const double population = population_lagrangian(mdp, dD, reg, 0.2, v, w);
        CHECK(std::abs(empirical_lagrangian(data, reg, 0.2, v, w) - population) < 1e-12);
        CHECK(std::abs(empirical_lagrangian(EmpiricalModel(data), reg, 0.2, v, w) - population) < 1e-12);
    }

    SUBCASE("unbiased over repeated datasets") {
        const TabularMdp mdp = random_mdp(4, 2, 0.9, 61);
        const Occupancy dD = behavior_occupancy(mdp, random_policy(4, 2, 62, 0.1));
        Rng rng(63);
        const Vector v = random_vector(4, rng, 3.0);
        const Matrix w = random_weights(4, 2, rng, 2.0);
        const double truth = population_lagrangian(mdp, dD, reg, 0.3, v, w);
        const int reps = 2000;
        double sum = 0.0, sum_sq = 0.0;
        for (int k = 0; k < reps; ++k) {
            const OfflineDataset data = generate_dataset(mdp, dD, 200, 200, 1000 + k);
            const double x = empirical_lagrangian(data, reg, 0.3, v, w);
            CHECK(std::abs(x - empirical_lagrangian(EmpiricalModel(data), reg, 0.3, v, w)) < 1e-10);
            sum += x;
            sum_sq += x * x;
        }
        const double mean = sum / reps;
        const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
        CHECK(std::abs(mean - truth) <= 4.0 * se);
    }
}

TEST_CASE("Bellman residual") {
    const TabularMdp mdp = random_mdp(5, 3, 0.9, 71);
    CHECK((residual_ev(mdp, Vector::Zero(5)) - mdp.reward()).cwiseAbs().maxCoeff() == 0.0);

    const Policy pi = Policy::deterministic({0, 2, 1, 1, 0}, 3);
    const PolicyValues pv = policy_values(mdp, pi);
    const Matrix e = residual_ev(mdp, pv.v);
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 3; ++a) CHECK(std::abs(e(s, a) - (pv.q(s, a) - pv.v(s))) < 1e-10);

    const OptimalValues opt = optimal_values(mdp);
    const Matrix e0 = residual_ev(mdp, opt.v);
    CHECK(e0.maxCoeff() <= 1e-10);
    for (int s = 0; s < 5; ++s) CHECK(std::abs(e0.row(s).maxCoeff()) < 1e-10);

    const Transition t{1, 2, 0.4, 3};
    CHECK(residual_ev(t, 0.9, pv.v) == doctest::Approx(0.4 + 0.9 * pv.v(3) - pv.v(1)));
}

TEST_CASE("approximation errors") {
    const TabularMdp mdp = random_mdp(5, 2, 0.9, 81);
    const Occupancy dD = behavior_occupancy(mdp, random_policy(5, 2, 82, 0.1));
    Rng rng(83);
    const Vector v_star = random_vector(5, rng, 3.0);
    const Matrix w_star = random_weights(5, 2, rng, 2.0);

    const ApproximationErrors exact = approximation_errors(mdp, dD, v_star, w_star, {v_star}, {w_star});
    CHECK(exact.eps_rv == 0.0);
    CHECK(exact.eps_rw == 0.0);

    const ApproximationErrors shifted =
        approximation_errors(mdp, dD, v_star, w_star, {(v_star.array() - 0.25).matrix()}, {w_star});
    CHECK(shifted.eps_rv == doctest::Approx(0.75).epsilon(1e-12));

    // Brute force over perturbed members.
    std::vector<Vector> values;
    std::vector<Matrix> weights;
    for (int i = 0; i < 6; ++i) {
        values.push_back(v_star + random_vector(5, rng, 0.5));
        weights.push_back((w_star + random_weights(5, 2, rng, 0.5)).eval());
    }
    Vector shift = Vector::Zero(5);
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 2; ++a)
            for (int sp = 0; sp < 5; ++sp) shift(sp) += dD.mass(s, a) * mdp.prob(s, a, sp);
    double best_v = 1e300, best_w = 1e300;
    for (const Vector& v : values) {
        double err = 0.0;
        for (int s = 0; s < 5; ++s)
            err += std::abs(v(s) - v_star(s)) * (mdp.init_dist()(s) + dD.mass.row(s).sum() + shift(s));
        best_v = std::min(best_v, err);
    }
    for (const Matrix& w : weights) best_w = std::min(best_w, (dD.mass.array() * (w - w_star).array().abs()).sum());
    const ApproximationErrors errs = approximation_errors(mdp, dD, v_star, w_star, values, weights);
    CHECK(std::abs(errs.eps_rv - best_v) < 1e-12);
    CHECK(std::abs(errs.eps_rw - best_w) < 1e-12);
}
