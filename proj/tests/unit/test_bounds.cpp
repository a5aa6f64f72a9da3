#include <doctest.h>

#include <cmath>

#include "prorl/bounds.hpp"
#include "prorl/error.hpp"

using namespace prorl;

TEST_CASE("statistical error term") {
    StatErrorInputs in;
    in.gamma = 0.9;
    in.alpha = 0.3;
    in.b_w = in.b_f = in.b_v = in.b_e = 1.0;
    in.n = in.n0 = 2;
    in.delta = 0.5;
    // With unit sizes, log(4|V|/delta) = log(4|V||W|/delta) = log 8.
    const double root = std::sqrt(std::log(8.0));
    CHECK(stat_error(in) == doctest::Approx(0.1 * root + root * (0.3 + 1.0)).epsilon(1e-14));

    StatErrorInputs big = in;
    big.n = big.n0 = 1000;
    StatErrorInputs huge = in;
    huge.n = huge.n0 = 1000000;
    CHECK(stat_error(huge) < stat_error(big));
    StatErrorInputs more_n0 = big;
    more_n0.n0 = 2000;
    CHECK(stat_error(more_n0) < stat_error(big));

    StatErrorInputs zero = big;
    zero.alpha = 0.0;
    zero.b_v = 3.0;
    zero.b_e = 3.0;
    zero.v_size = 4;
    zero.w_size = 5;
    const double first = 0.1 * 3.0 * std::sqrt(2.0 * std::log(16.0 / 0.5) / 1000.0);
    CHECK(stat_error(zero) - first == doctest::Approx(3.0 * std::sqrt(2.0 * std::log(80.0 / 0.5) / 1000.0)));

    StatErrorInputs bad = in;
    bad.n = 0;
    CHECK_THROWS_AS(stat_error(bad), InvalidArgument);
    bad = in;
    bad.delta = 1.0;
    CHECK_THROWS_AS(stat_error(bad), InvalidArgument);
}

TEST_CASE("right-hand sides") {
    CHECK(theorem1_rhs(0.3, 0.3, 1.0, 0.9) == doctest::Approx(40.0));
    CHECK(theorem1_rhs(0.01, 0.1, 1.0, 0.9) == doctest::Approx(12.649110640673518).epsilon(1e-12));
    CHECK(theorem1_rhs(0.01, 0.1, 1.0, 0.9) < theorem1_rhs(0.02, 0.1, 1.0, 0.9));
    CHECK_THROWS_AS(theorem1_rhs(0.01, 0.0, 1.0, 0.9), InvalidArgument);
    CHECK(residual_bound(2.0, 0.9) == doctest::Approx(4.8));

    CHECK(robust_rhs(0.01, 0.0, 0.0, 0.1, 1.0, 0.9) == doctest::Approx(theorem1_rhs(0.01, 0.1, 1.0, 0.9)));
    CHECK(robust_rhs(0.01, 0.02, 0.03, 0.1, 1.0, 0.9) ==
          doctest::Approx(theorem1_rhs(0.01, 0.1, 1.0, 0.9) + 20.0 * std::sqrt(2.0 * 0.05 / 0.1)));
    CHECK(approximation_error(0.1, 0.2, 3.0, 5.0, 0.5, 4.0) == doctest::Approx(4.0 * 0.1 + 7.0 * 0.2));

    CHECK(cloning_term(2.0, 600, 4, 0.1) == doctest::Approx(8.0 * std::sqrt(6.0 * std::log(160.0) / 600.0)));
    CHECK(cloning_rhs(2.0, 600, 4, 0.1, 0.04, 0.1, 1.0) ==
          doctest::Approx(cloning_term(2.0, 600, 4, 0.1) + 50.0 * std::sqrt(0.4)));
}

TEST_CASE("alpha selection") {
    CHECK(recommended_alpha(AlphaTarget::unregularized, 0.2, 1.0) == doctest::Approx(0.1));
    CHECK(recommended_alpha(AlphaTarget::constrained, 0.2, 1.0) == doctest::Approx(0.05));
    CHECK(recommended_alpha(AlphaTarget::unregularized, 0.37, 2.5) * 2.0 * 2.5 == doctest::Approx(0.37));
    CHECK_THROWS_AS(recommended_alpha(AlphaTarget::unregularized, 0.0, 1.0), InvalidArgument);

    const std::vector<double> coarse{0.5, 0.01, 0.1};
    CHECK(alpha_un_selector(0.0, 0.0, 1.0, 1.0, 0.9, coarse) == 0.01);
    CHECK_THROWS_AS(alpha_un_selector(0.1, 0.1, 1.0, 1.0, 0.9, {}), InvalidArgument);

    // alpha B + c alpha^{-1/2} is minimized at (c / (2B))^{2/3}.
    std::vector<double> fine;
    for (int i = 1; i <= 200000; ++i) fine.push_back(i * 1e-5);
    const double eps = 0.003, b_f0 = 2.0;
    const double c = 20.0 * std::sqrt(2.0 * eps);
    const double stationary = std::pow(c / (2.0 * b_f0), 2.0 / 3.0);
    CHECK(std::abs(alpha_un_selector(eps, 0.0, b_f0, 1.0, 0.9, fine) - stationary) <= 1e-5);

    auto objective = [&](double e) {
        const double a = alpha_un_selector(e, 0.0, b_f0, 1.0, 0.9, fine);
        return a * b_f0 + 20.0 * std::sqrt(2.0 * e / a);
    };
    CHECK(objective(2.0 * eps) / objective(eps) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-4));
}

TEST_CASE("alpha-zero bound shrinks with data") {
    const double small = alpha_zero_rhs(2.0, 3.0, 0.5, 0.9, 1000, 1000, 1, 10, 0.1);
    const double large = alpha_zero_rhs(2.0, 3.0, 0.5, 0.9, 100000, 100000, 1, 10, 0.1);
    CHECK(large < small);
    CHECK(small / large == doctest::Approx(10.0).epsilon(1e-9));
}
