#include <doctest.h>

#include "helpers.hpp"
#include "prorl/error.hpp"
#include "prorl/regularizer.hpp"

using namespace prorl;

TEST_CASE("quadratic closed forms") {
    const Regularizer f = Regularizer::quadratic(2.0);
    CHECK(f.eval(3.0) == 9.0);
    CHECK(f.deriv(3.0) == 6.0);
    CHECK(f.deriv_inverse(6.0) == 3.0);
    CHECK(f.eval(0.0) == 0.0);
    CHECK(f.strong_convexity() == 2.0);
    const RegularizerBounds b = f.bounds(3.0);
    CHECK(b.b_f == 9.0);
    CHECK(b.b_fprime == 6.0);
    const RegularizerBounds zero = f.bounds(0.0);
    CHECK(zero.b_f == 0.0);
    CHECK(zero.b_fprime == 0.0);
}

TEST_CASE("derivative round trip") {
    Rng rng(5);
    for (const Regularizer& f : {Regularizer::quadratic(0.7), Regularizer::shifted_quadratic(1.5, 1.0)})
        for (int i = 0; i < 1000; ++i) {
            const double x = rng.uniform(0.0, 10.0);
            CHECK(std::abs(f.deriv_inverse(f.deriv(x)) - x) < 1e-12);
        }
}

TEST_CASE("bounds match a grid search") {
    for (const Regularizer& f : {Regularizer::quadratic(1.3), Regularizer::shifted_quadratic(1.0, 1.0),
                                 Regularizer::shifted_quadratic(2.0, 5.0)}) {
        for (double b_w : {0.5, 2.0, 7.0}) {
            double sup_f = 0.0, sup_fp = 0.0;
            for (int i = 0; i <= 10000; ++i) {
                const double x = b_w * i / 10000.0;
                sup_f = std::max(sup_f, std::abs(f.eval(x)));
                sup_fp = std::max(sup_fp, std::abs(f.deriv(x)));
            }
            const RegularizerBounds b = f.bounds(b_w);
            CHECK(std::abs(b.b_f - sup_f) < 1e-9);
            CHECK(std::abs(b.b_fprime - sup_fp) < 1e-9);
        }
    }
}

TEST_CASE("shifted quadratic vanishes at the shift") {
    const Regularizer f = Regularizer::shifted_quadratic(2.0, 1.0);
    CHECK(f.eval(1.0) == 0.0);
    CHECK(f.deriv(1.0) == 0.0);
    CHECK(f.eval(3.0) == doctest::Approx(4.0));
}

TEST_CASE("f-divergence") {
    const Regularizer f = Regularizer::quadratic(2.0);
    Rng rng(11);
    Matrix m(3, 2);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(0.1, 1.0);
    const Occupancy dD(m / m.sum());
    CHECK(f_divergence(f, dD, dD) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f_divergence(f, Occupancy(Matrix::Zero(3, 2)), dD) == 0.0);

    Matrix q(3, 2);
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = rng.uniform(0.0, 1.0);
    const Occupancy d(q / q.sum());
    double direct = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double ratio = d.mass(i) / dD.mass(i);
        direct += dD.mass(i) * ratio * ratio;  // M/2 = 1
    }
    CHECK(std::abs(f_divergence(f, d, dD) - direct) < 1e-12);

    Matrix hole = dD.mass;
    hole(0, 0) = 0.0;
    CHECK_THROWS_AS(f_divergence(f, d, Occupancy(hole / hole.sum())), InvalidArgument);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(Regularizer::quadratic(0.0), InvalidArgument);
    CHECK_THROWS_AS(Regularizer::quadratic(-1.0), InvalidArgument);
    CHECK_THROWS_AS(Regularizer::quadratic(1.0).bounds(-1.0), InvalidArgument);
}
