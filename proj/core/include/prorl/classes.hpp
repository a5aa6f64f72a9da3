#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prorl/mdp.hpp"
#include "prorl/objective.hpp"
#include "prorl/oracle.hpp"
#include "prorl/regularizer.hpp"

namespace prorl {

enum class BoundAction { reject, clip };

// What a constructor did to out-of-box candidates.
struct ClassAudit {
    std::size_t clipped = 0;
    std::size_t rejected = 0;
};

struct ValueClass {
    std::vector<Vector> members;
    double bound = 0.0;        // ||v||_inf <= bound, or 0 <= v <= bound when nonnegative
    bool nonnegative = false;  // box used by the alpha = 0 variant
    ClassAudit audit;
};

// Sum_a pi_D(a|s) w(s,a) >= b_wl for every state.
struct WeightFloor {
    double b_wl;
    Policy behavior;
};

struct WeightClass {
    std::vector<Matrix> members;
    double bound = 0.0;  // 0 <= w <= bound
    std::optional<WeightFloor> floor;
    ClassAudit audit;
};

struct PolicyClass {
    std::vector<Policy> members;
};

ValueClass make_value_class(const std::vector<Vector>& candidates, double bound, bool nonnegative,
                            BoundAction action);

// Floor violations cannot be repaired by clipping and are always rejected.
WeightClass make_weight_class(const std::vector<Matrix>& candidates, double bound,
                              std::optional<WeightFloor> floor, BoundAction action);

bool satisfies_floor(const Matrix& w, const WeightFloor& floor, double tol = 1e-12);

enum class DistractorMode {
    uniform,    // uniform over the bound box
    perturbed,  // oracle member plus uniform noise of width scale_max * bound
    multiscale  // as perturbed, with widths geometric from scale_max down to scale_min
};

struct DistractorOptions {
    DistractorMode mode = DistractorMode::uniform;
    double scale_max = 0.5;
    double scale_min = 1e-3;
};

struct ClassBounds {
    double b_v = 0.0;
    double b_w = 0.0;
    bool nonnegative_values = false;
    std::optional<WeightFloor> floor;
};

struct FunctionClasses {
    ValueClass values;
    WeightClass weights;
};

// Default bounds for an oracle solution: B_w = cap or max w*, B_v from the
// boundedness lemma (alpha B_f'(B_w) + 1) / (1 - gamma).
ClassBounds default_bounds(const TabularMdp& mdp, const Regularizer& reg, const RegularizedSolution& solution);

// Oracle pair first, then num_distractors seeded distractors clipped into the boxes.
// Weights are zeroed on cells with dD = 0.
FunctionClasses build_realizable(const Vector& v_star, const Matrix& w_star, const Occupancy& dD,
                                 const ClassBounds& bounds, int num_distractors, std::uint64_t seed,
                                 const DistractorOptions& options = {});

FunctionClasses build_realizable(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                 const RegularizedSolution& solution, int num_distractors, std::uint64_t seed,
                                 const DistractorOptions& options = {});

struct MisspecifiedClasses {
    FunctionClasses classes;
    ApproximationErrors errors;
};

// Best members are v* + c*1 and (1 + c) w*, so eps_rv = 3c and eps_rw = c when
// no distractor is closer; the reported errors are recomputed by enumeration.
MisspecifiedClasses build_misspecified(const TabularMdp& mdp, const Occupancy& dD, const Vector& v_star,
                                       const Matrix& w_star, double perturbation, int num_distractors,
                                       std::uint64_t seed, const DistractorOptions& options = {});

// h(s,a) = +1 if pi(a|s) > pi'(a|s), -1 if <, +1 on ties, for every ordered pair; deduplicated.
std::vector<Matrix> witness_class(const PolicyClass& policies);

}  // namespace prorl
