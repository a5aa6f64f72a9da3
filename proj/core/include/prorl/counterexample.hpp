#pragma once

#include <vector>

#include "prorl/mdp.hpp"

namespace prorl {

// Discounted encoding of the two-stage instance on which the unregularized
// objective cannot tell the good weight from the bad one.
//
// States A, B, C, T. From A, L leads to B and R leads to C. B pays 1 for both
// actions; C pays 1 only for the instance's good action (L in instance 1,
// R in instance 2). B and C move to the absorbing zero-reward state T.
// The data cover (A,L), (A,R), B and T uniformly and never visit C.
namespace counterexample {
inline constexpr int A = 0;
inline constexpr int B = 1;
inline constexpr int C = 2;
inline constexpr int T = 3;
inline constexpr int L = 0;
inline constexpr int R = 1;
}  // namespace counterexample

struct CounterexampleBundle {
    TabularMdp mdp;
    Occupancy data;
    Policy behavior;
    Matrix w1;  // occupancy ratio of the policy taking L at A
    Matrix w2;  // same mass pattern with (A,R) in place of (A,L)
    Vector v0;  // optimal values, shared by both instances
};

CounterexampleBundle build_counterexample(double gamma, int instance);

}  // namespace prorl
