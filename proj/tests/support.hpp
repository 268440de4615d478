#pragma once

// Test-only oracles, independent of the library paths they check.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <vector>

namespace testsupport {

inline std::int64_t double_bits(double v) {
    std::int64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    // Map to a monotone integer line so distances work across zero.
    return bits < 0 ? std::numeric_limits<std::int64_t>::min() - bits : bits;
}

/// Number of representable doubles between a and b.
inline std::int64_t ulps_between(double a, double b) {
    if (a == b) return 0;
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return std::numeric_limits<std::int64_t>::max();
    }
    const std::int64_t d = double_bits(a) - double_bits(b);
    return d < 0 ? -d : d;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

constexpr double kPi = 3.14159265358979323846;

inline double normal_pdf(double x, double mean, double var) {
    const double r = x - mean;
    return std::exp(-0.5 * r * r / var) / std::sqrt(2.0 * kPi * var);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Negative binomial marginal of a Poisson with Gamma(shape r, rate n) mean.
inline double neg_binomial_pmf(double y, double r, double n) {
    const double log_p = std::lgamma(y + r) - std::lgamma(r) - std::lgamma(y + 1.0)
                         + r * std::log(n / (n + 1.0)) - y * std::log(n + 1.0);
    return std::exp(log_p);
}

inline double gamma_pdf(double y, double shape, double rate) {
    return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(y) - rate * y
                    - std::lgamma(shape));
}

/// d/dy log of a two-component Gaussian mixture density.
inline double mixture_log_density_score(double y, const std::vector<double>& w,
                                        const std::vector<double>& means,
                                        const std::vector<double>& vars) {
    double f = 0.0, fp = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double pdf = normal_pdf(y, means[k], vars[k]);
        f += w[k] * pdf;
        fp += w[k] * pdf * (-(y - means[k]) / vars[k]);
    }
    return fp / f;
}

/// Composite Simpson on [lo, hi] with n panels (n even).
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Textbook GARCH(1,1) recursion, kept as an independent reference.
inline std::vector<double> garch_reference_path(double omega_g, double alpha_g, double beta_g,
                                                double h1, const std::vector<double>& y) {
    std::vector<double> h(y.size());
    double cur = h1;
    for (std::size_t t = 0; t < y.size(); ++t) {
        h[t] = cur;
        cur = omega_g + alpha_g * y[t] * y[t] + beta_g * cur;
    }
    return h;
}

}  // namespace testsupport
