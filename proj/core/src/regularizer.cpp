#include "prorl/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prorl/error.hpp"

namespace prorl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Regularizer::Regularizer(Kind kind) : kind_(kind) {
    if (!(strong_convexity() > 0.0) || !std::isfinite(strong_convexity()))
        throw InvalidArgument("regularizer needs m_f > 0");
    if (const auto* s = std::get_if<ShiftedQuadratic>(&kind_); s && !std::isfinite(s->shift))
        throw InvalidArgument("regularizer shift must be finite");
}

double Regularizer::eval(double x) const {
    return std::visit(overloaded{[&](const Quadratic& q) { return 0.5 * q.m_f * x * x; },
                                 [&](const ShiftedQuadratic& q) {
                                     const double u = x - q.shift;
                                     return 0.5 * q.m_f * u * u;
                                 }},
                      kind_);
}

double Regularizer::deriv(double x) const {
    return std::visit(overloaded{[&](const Quadratic& q) { return q.m_f * x; },
                                 [&](const ShiftedQuadratic& q) { return q.m_f * (x - q.shift); }},
                      kind_);
}

double Regularizer::deriv_inverse(double y) const {
    return std::visit(overloaded{[&](const Quadratic& q) { return y / q.m_f; },
                                 [&](const ShiftedQuadratic& q) { return y / q.m_f + q.shift; }},
                      kind_);
}

double Regularizer::strong_convexity() const {
    return std::visit([](const auto& q) { return q.m_f; }, kind_);
}

RegularizerBounds Regularizer::bounds(double b_w) const {
    if (!(b_w >= 0.0)) throw InvalidArgument("bounds: B_w must be nonnegative");
    // f is convex, so |f| peaks at an endpoint or at the minimizer; f' is monotone.
    double b_f = std::max(std::abs(eval(0.0)), std::abs(eval(b_w)));
    const double argmin = std::clamp(deriv_inverse(0.0), 0.0, b_w);
    b_f = std::max(b_f, std::abs(eval(argmin)));
    const double b_fprime = std::max(std::abs(deriv(0.0)), std::abs(deriv(b_w)));
    return {b_f, b_fprime};
}

double f_divergence(const Regularizer& reg, const Occupancy& d, const Occupancy& dD) {
    if (d.mass.rows() != dD.mass.rows() || d.mass.cols() != dD.mass.cols())
        throw InvalidArgument("f_divergence: shape mismatch");
    double total = 0.0;
    for (Eigen::Index s = 0; s < d.mass.rows(); ++s) {
        for (Eigen::Index a = 0; a < d.mass.cols(); ++a) {
            const double base = dD.mass(s, a);
            if (base > 0.0) {
                total += base * reg.eval(d.mass(s, a) / base);
            } else if (d.mass(s, a) > 0.0) {
                throw InvalidArgument("f_divergence: d has mass on uncovered cell (s=" + std::to_string(s) +
                                      ", a=" + std::to_string(a) + ")");
            }
        }
    }
    return total;
}

}  // namespace prorl
