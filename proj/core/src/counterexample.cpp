#include "prorl/counterexample.hpp"

#include "prorl/error.hpp"
#include "prorl/generators.hpp"
#include "prorl/oracle.hpp"

namespace prorl {

namespace {

TabularMdp make_mdp(double gamma, int instance) {
    using namespace counterexample;
    Matrix transition = Matrix::Zero(8, 4);
    transition(A * 2 + L, B) = 1.0;
    transition(A * 2 + R, C) = 1.0;
    for (int a = 0; a < 2; ++a) {
        transition(B * 2 + a, T) = 1.0;
        transition(C * 2 + a, T) = 1.0;
        transition(T * 2 + a, T) = 1.0;
    }
    Matrix reward = Matrix::Zero(4, 2);
    reward(B, L) = 1.0;
    reward(B, R) = 1.0;
    reward(C, instance == 1 ? L : R) = 1.0;
    Vector init = Vector::Zero(4);
    init(A) = 1.0;
    return TabularMdp(4, 2, gamma, std::move(transition), std::move(reward), std::move(init),
                      TabularMdp::InitSupport::allow_zero);
}

}  // namespace

CounterexampleBundle build_counterexample(double gamma, int instance) {
    using namespace counterexample;
    if (instance != 1 && instance != 2) throw InvalidArgument("counterexample instance must be 1 or 2");
    TabularMdp mdp = make_mdp(gamma, instance);

    Matrix data = Matrix::Zero(4, 2);
    data(A, L) = data(A, R) = 1.0 / 6.0;
    data(B, L) = data(B, R) = 1.0 / 6.0;
    data(T, L) = data(T, R) = 1.0 / 6.0;
    Occupancy dD(data);

    // Occupancy of "L at A, uniform elsewhere": 1-gamma at A, gamma(1-gamma) at B, gamma^2 at T.
    Matrix d1 = Matrix::Zero(4, 2);
    d1(A, L) = 1.0 - gamma;
    d1(B, L) = d1(B, R) = 0.5 * gamma * (1.0 - gamma);
    d1(T, L) = d1(T, R) = 0.5 * gamma * gamma;
    Matrix d2 = d1;
    d2(A, L) = 0.0;
    d2(A, R) = 1.0 - gamma;

    Matrix w1 = Matrix::Zero(4, 2);
    Matrix w2 = Matrix::Zero(4, 2);
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 2; ++a)
            if (data(s, a) > 0.0) {
                w1(s, a) = d1(s, a) / data(s, a);
                w2(s, a) = d2(s, a) / data(s, a);
            }
    Vector v0 = solve_unregularized(mdp).v;
    Policy behavior = behavior_policy(dD);
    return {std::move(mdp), std::move(dD), std::move(behavior), std::move(w1), std::move(w2), std::move(v0)};
}

}  // namespace prorl
