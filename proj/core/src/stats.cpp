#include "prorl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prorl/error.hpp"

namespace prorl {

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double t_quantile_975(std::size_t dof) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                   2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                   2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof == 0) return std::numeric_limits<double>::infinity();
    if (dof <= 30) return table[dof - 1];
    return 1.960;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line needs at least two paired points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("fit_line: x values are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    const std::size_t dof = x.size() - 2;
    fit.slope_stderr = dof > 0 ? std::sqrt(ss_res / static_cast<double>(dof) / sxx) : 0.0;
    const double t = dof > 0 ? t_quantile_975(dof) : 0.0;
    fit.ci_low = fit.slope - t * fit.slope_stderr;
    fit.ci_high = fit.slope + t * fit.slope_stderr;
    return fit;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("fit_loglog needs positive values");
        lx.push_back(std::log10(x[i]));
        ly.push_back(std::log10(y[i]));
    }
    return fit_line(lx, ly);
}

std::size_t binomial_quantile(std::size_t n, double p, double level) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binomial_quantile: p must lie in [0, 1]");
    // Accumulate the pmf in log space to stay accurate for n in the thousands.
    double cdf = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double log_pmf = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                               std::lgamma(static_cast<double>(n - k) + 1.0) +
                               (k > 0 ? static_cast<double>(k) * std::log(p) : 0.0) +
                               (n > k ? static_cast<double>(n - k) * std::log1p(-p) : 0.0);
        cdf += std::exp(log_pmf);
        if (cdf >= level) return k;
    }
    return n;
}

}  // namespace prorl
