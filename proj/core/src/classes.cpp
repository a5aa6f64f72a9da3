#include "prorl/classes.hpp"

#include <algorithm>
#include <cmath>

#include "prorl/error.hpp"
#include "prorl/rng.hpp"

namespace prorl {

namespace {

bool in_value_box(const Vector& v, double bound, bool nonnegative) {
    if (nonnegative) return (v.array() >= 0.0).all() && (v.array() <= bound).all();
    return v.lpNorm<Eigen::Infinity>() <= bound;
}

double scale_for(const DistractorOptions& options, int k, int count) {
    if (options.mode != DistractorMode::multiscale || count <= 1) return options.scale_max;
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    return options.scale_max * std::pow(options.scale_min / options.scale_max, t);
}

}  // namespace

ValueClass make_value_class(const std::vector<Vector>& candidates, double bound, bool nonnegative,
                            BoundAction action) {
    if (!(bound >= 0.0)) throw InvalidArgument("value class bound must be nonnegative");
    ValueClass out;
    out.bound = bound;
    out.nonnegative = nonnegative;
    const double lo = nonnegative ? 0.0 : -bound;
    for (const Vector& v : candidates) {
        if (!v.allFinite()) throw InvalidArgument("value class member has non-finite entries");
        if (in_value_box(v, bound, nonnegative)) {
            out.members.push_back(v);
        } else if (action == BoundAction::clip) {
            out.members.push_back(v.cwiseMax(lo).cwiseMin(bound));
            ++out.audit.clipped;
        } else {
            ++out.audit.rejected;
        }
    }
    return out;
}

bool satisfies_floor(const Matrix& w, const WeightFloor& floor, double tol) {
    const Vector mean = w.cwiseProduct(floor.behavior.probs).rowwise().sum();
    return (mean.array() >= floor.b_wl - tol).all();
}

WeightClass make_weight_class(const std::vector<Matrix>& candidates, double bound,
                              std::optional<WeightFloor> floor, BoundAction action) {
    if (!(bound >= 0.0)) throw InvalidArgument("weight class bound must be nonnegative");
    WeightClass out;
    out.bound = bound;
    out.floor = floor;
    for (const Matrix& w : candidates) {
        if (!w.allFinite()) throw InvalidArgument("weight class member has non-finite entries");
        Matrix member = w;
        const bool in_box = (w.array() >= 0.0).all() && (w.array() <= bound).all();
        if (!in_box) {
            if (action == BoundAction::reject) {
                ++out.audit.rejected;
                continue;
            }
            member = w.cwiseMax(0.0).cwiseMin(bound);
            ++out.audit.clipped;
        }
        if (floor && !satisfies_floor(member, *floor)) {
            ++out.audit.rejected;
            continue;
        }
        out.members.push_back(std::move(member));
    }
    return out;
}

ClassBounds default_bounds(const TabularMdp& mdp, const Regularizer& reg, const RegularizedSolution& solution) {
    ClassBounds b;
    b.b_w = solution.cap ? *solution.cap : solution.w_star.maxCoeff();
    b.b_v = (solution.alpha * reg.bounds(b.b_w).b_fprime + 1.0) / (1.0 - mdp.gamma());
    return b;
}

FunctionClasses build_realizable(const Vector& v_star, const Matrix& w_star, const Occupancy& dD,
                                 const ClassBounds& bounds, int num_distractors, std::uint64_t seed,
                                 const DistractorOptions& options) {
    if (num_distractors < 0) throw InvalidArgument("num_distractors must be nonnegative");
    Rng rng(seed);
    const Eigen::Index S = v_star.size();
    const Matrix covered = (dD.mass.array() > 0.0).cast<double>().matrix();
    std::vector<Vector> values{v_star};
    std::vector<Matrix> weights{w_star};
    const double v_lo = bounds.nonnegative_values ? 0.0 : -bounds.b_v;
    for (int k = 0; k < num_distractors; ++k) {
        Vector v(S);
        Matrix w(w_star.rows(), w_star.cols());
        if (options.mode == DistractorMode::uniform) {
            for (Eigen::Index s = 0; s < S; ++s) v(s) = rng.uniform(v_lo, bounds.b_v);
            for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(0.0, bounds.b_w);
        } else {
            const double scale = scale_for(options, k, num_distractors);
            for (Eigen::Index s = 0; s < S; ++s) v(s) = v_star(s) + scale * bounds.b_v * rng.uniform(-1.0, 1.0);
            for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = w_star(i) + scale * bounds.b_w * rng.uniform(-1.0, 1.0);
        }
        values.push_back(std::move(v));
        weights.push_back(w.cwiseProduct(covered));
    }
    FunctionClasses out;
    out.values = make_value_class(values, bounds.b_v, bounds.nonnegative_values, BoundAction::clip);
    // Distractors that break the floor are dropped; the oracle member satisfies it.
    out.weights = make_weight_class(weights, bounds.b_w, bounds.floor, BoundAction::clip);
    if (out.values.members.front() != v_star || out.weights.members.empty() || out.weights.members.front() != w_star)
        throw InvalidArgument("build_realizable: oracle pair violates the declared class bounds");
    return out;
}

FunctionClasses build_realizable(const TabularMdp& mdp, const Occupancy& dD, const Regularizer& reg,
                                 const RegularizedSolution& solution, int num_distractors, std::uint64_t seed,
                                 const DistractorOptions& options) {
    return build_realizable(solution.v_star, solution.w_star, dD, default_bounds(mdp, reg, solution),
                            num_distractors, seed, options);
}

MisspecifiedClasses build_misspecified(const TabularMdp& mdp, const Occupancy& dD, const Vector& v_star,
                                       const Matrix& w_star, double perturbation, int num_distractors,
                                       std::uint64_t seed, const DistractorOptions& options) {
    if (!(perturbation >= 0.0)) throw InvalidArgument("perturbation must be nonnegative");
    const Vector v_best = v_star.array() + perturbation;
    const Matrix w_best = (1.0 + perturbation) * w_star;
    ClassBounds bounds;
    bounds.b_v = v_best.lpNorm<Eigen::Infinity>();
    bounds.b_w = w_best.maxCoeff();
    FunctionClasses classes = build_realizable(v_best, w_best, dD, bounds, num_distractors, seed, options);
    MisspecifiedClasses out{std::move(classes), {}};
    out.errors = approximation_errors(mdp, dD, v_star, w_star, out.classes.values.members, out.classes.weights.members);
    return out;
}

std::vector<Matrix> witness_class(const PolicyClass& policies) {
    if (policies.members.empty()) throw InvalidArgument("witness_class: empty policy class");
    std::vector<Matrix> out;
    for (const Policy& p : policies.members) {
        for (const Policy& q : policies.members) {
            Matrix h(p.probs.rows(), p.probs.cols());
            for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = p.probs(i) < q.probs(i) ? -1.0 : 1.0;
            if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(std::move(h));
        }
    }
    return out;
}

}  // namespace prorl
