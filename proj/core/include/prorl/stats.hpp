#pragma once

#include <cstddef>
#include <vector>

namespace prorl {

double median(std::vector<double> values);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double ci_low = 0.0;  // 95% interval for the slope
    double ci_high = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Least squares on (log10 x, log10 y).
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Smallest k with P[Binomial(n, p) <= k] >= level.
std::size_t binomial_quantile(std::size_t n, double p, double level);

// Upper 97.5% point of Student's t with the given degrees of freedom.
double t_quantile_975(std::size_t dof);

}  // namespace prorl
