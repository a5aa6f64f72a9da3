#pragma once

#include <variant>

#include "prorl/mdp.hpp"

namespace prorl {

// f(x) = (M/2) x^2
struct Quadratic {
    double m_f;
};

// f(x) = (M/2) (x - shift)^2
struct ShiftedQuadratic {
    double m_f;
    double shift;
};

struct RegularizerBounds {
    double b_f;       // sup_{0<=x<=B_w} |f(x)|
    double b_fprime;  // sup_{0<=x<=B_w} |f'(x)|
};

/// Strongly convex scalar function defining the f-divergence penalty.
class Regularizer {
public:
    using Kind = std::variant<Quadratic, ShiftedQuadratic>;

    explicit Regularizer(Kind kind);

    static Regularizer quadratic(double m_f) { return Regularizer(Quadratic{m_f}); }
    static Regularizer shifted_quadratic(double m_f, double shift) {
        return Regularizer(ShiftedQuadratic{m_f, shift});
    }

    double eval(double x) const;
    double deriv(double x) const;
    double deriv_inverse(double y) const;
    double strong_convexity() const;
    RegularizerBounds bounds(double b_w) const;

    const Kind& kind() const { return kind_; }

private:
    Kind kind_;
};

// sum over dD > 0 cells of dD * f(d / dD). Throws if d > 0 on a cell with dD = 0.
double f_divergence(const Regularizer& reg, const Occupancy& d, const Occupancy& dD);

}  // namespace prorl
