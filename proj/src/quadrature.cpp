#include "sdfilter/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace sdfilter {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kPi = 3.14159265358979323846;

double log_gaussian_pdf(double x, double mean, double var) {
    const double r = x - mean;
    return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * r * r / var;
}

/// log h(x) of the NEF base measure, x being the NEF observation.
double log_base_measure(const EdmSpec& spec, double obs) {
    switch (spec.family()) {
        case Family::GaussianLocation:
            return -0.5 * (kLog2Pi + std::log(spec.phi())) - obs * obs / (2.0 * spec.phi());
        case Family::Poisson:
            return -std::lgamma(obs + 1.0);
        case Family::Gamma: {
            const double k = 1.0 / spec.phi();
            return (k - 1.0) * std::log(obs) - std::lgamma(k);
        }
        case Family::GaussianVariance:
            return -0.5 * std::log(kPi * obs);
    }
    throw std::invalid_argument("unknown family");
}

bool natural_space_is_negative_half_line(const EdmSpec& spec) {
    return spec.family() == Family::Gamma || spec.family() == Family::GaussianVariance;
}

/// Conjugate-type kernel exp(a*theta - b*psi(theta)) expressed in the
/// integration variable t: t = theta for families with natural space R,
/// t = log(-theta) for Gamma-type families (the Jacobian is folded in, so
/// integrals over t equal integrals over theta).
struct NefKernel {
    const EdmSpec* spec;
    double a;
    double b;
    bool log_negative;

    static NefKernel make(const EdmSpec& spec, double a, double b) {
        NefKernel k;
        k.spec = &spec;
        k.a = a;
        k.b = b;
        k.log_negative = natural_space_is_negative_half_line(spec);
        if (k.log_negative && !(a > 0.0)) {
            throw std::domain_error("conjugate kernel needs a > 0 on a positive mean domain");
        }
        if (!(b > 0.0)) throw std::domain_error("conjugate kernel needs b > 0");
        return k;
    }

    double theta_of(double t) const { return log_negative ? -std::exp(t) : t; }

    double log_kernel(double t) const {
        if (log_negative) {
            const double shape = b / spec->phi() + 1.0;
            return -a * std::exp(t) + shape * t;
        }
        return a * t - b * spec->psi(t);
    }

    double mode() const {
        if (log_negative) return std::log((b / spec->phi() + 1.0) / a);
        const double mean = a / b;
        if (!spec->mean_in_domain(mean)) {
            throw std::domain_error("conjugate kernel mean a/b outside the mean domain");
        }
        return natural_from_mean(*spec, mean);
    }

    double sd_at_mode() const {
        if (log_negative) return 1.0 / std::sqrt(b / spec->phi() + 1.0);
        return 1.0 / std::sqrt(b * spec->psi_double_prime(mode()));
    }
};

/// Widen [lo, hi] until the log kernel has dropped by at least halfwidth^2/2
/// relative to the mode on both sides. Gaussian-like kernels keep the
/// mode +/- halfwidth*sd window; heavy-tailed conjugate kernels (small tau)
/// get the extra room they need.
void expand_window(const std::function<double(double)>& log_kernel, double mode, double sd,
                   double halfwidth, double& lo, double& hi) {
    const double target = log_kernel(mode) - 0.5 * halfwidth * halfwidth;
    lo = mode - halfwidth * sd;
    hi = mode + halfwidth * sd;
    for (int i = 0; i < 200 && log_kernel(lo) > target; ++i) lo -= 4.0 * sd;
    for (int i = 0; i < 200 && log_kernel(hi) > target; ++i) hi += 4.0 * sd;
}

struct ComponentMoment {
    double log_mass;  // log of w_k * integral_k
    double mean;      // posterior mean of g within component k
};

double combine_log_masses(const std::vector<ComponentMoment>& parts) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : parts) m = std::max(m, p.log_mass);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (const auto& p : parts) s += std::exp(p.log_mass - m);
    return m + std::log(s);
}

double combine_means(const std::vector<ComponentMoment>& parts) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : parts) m = std::max(m, p.log_mass);
    double num = 0.0, den = 0.0;
    for (const auto& p : parts) {
        const double w = std::exp(p.log_mass - m);
        num += w * p.mean;
        den += w;
    }
    if (den <= 0.0 || !std::isfinite(den)) {
        throw std::underflow_error("posterior mass is numerically zero");
    }
    return num / den;
}

}  // namespace

void QuadratureConfig::validate() const {
    if (node_count < 16) throw std::invalid_argument("quadrature needs node_count >= 16");
    if (scheme == Scheme::GaussHermite && node_count > 300) {
        throw std::invalid_argument("gauss-hermite weights underflow beyond 300 nodes");
    }
    if (!(fd_step > 0.0) || fd_step > 1e-2) {
        throw std::invalid_argument("fd_step must lie in (0, 1e-2]");
    }
    if (!(domain_halfwidth_sigmas > 0.0)) {
        throw std::invalid_argument("domain_halfwidth_sigmas must be positive");
    }
}

QuadratureConfig QuadratureConfig::gauss_hermite(int nodes) {
    QuadratureConfig cfg;
    cfg.scheme = Scheme::GaussHermite;
    cfg.node_count = nodes;
    return cfg;
}

QuadratureConfig QuadratureConfig::trapezoid(int nodes) {
    QuadratureConfig cfg;
    cfg.scheme = Scheme::AdaptiveTrapezoid;
    cfg.node_count = nodes;
    return cfg;
}

PriorSpec PriorSpec::gaussian(double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("prior variance must be positive");
    PriorSpec p;
    p.kind_ = Kind::Gaussian;
    p.space_ = ParamSpace::Mean;
    p.mean_ = mean;
    p.variance_ = variance;
    return p;
}

PriorSpec PriorSpec::gaussian_mixture(std::vector<double> weights, std::vector<double> means,
                                      std::vector<double> variances) {
    if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size()) {
        throw std::invalid_argument("mixture components must have matching nonzero lengths");
    }
    double total = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("mixture weights must be positive");
        if (!(variances[i] > 0.0)) throw std::invalid_argument("mixture variances must be positive");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
    PriorSpec p;
    p.kind_ = Kind::GaussianMixture;
    p.space_ = ParamSpace::Mean;
    p.weights_ = std::move(weights);
    p.means_ = std::move(means);
    p.variances_ = std::move(variances);
    return p;
}

PriorSpec PriorSpec::conjugate_nef(double tau, double n, const EdmSpec& family) {
    if (!(n > 0.0)) throw std::invalid_argument("conjugate prior strength n must be positive");
    if (!family.mean_in_domain(tau / n)) {
        throw std::invalid_argument("conjugate prior mean tau/n outside the family's mean domain");
    }
    PriorSpec p;
    p.kind_ = Kind::ConjugateNef;
    p.space_ = ParamSpace::Natural;
    p.tau_ = tau;
    p.n_ = n;
    p.family_.push_back(family);
    return p;
}

PriorSpec PriorSpec::custom(std::function<double(double)> log_density, ParamSpace space,
                            double center, double scale) {
    if (!log_density) throw std::invalid_argument("custom prior needs a log-density callback");
    if (!(scale > 0.0)) throw std::invalid_argument("custom prior scale must be positive");
    PriorSpec p;
    p.kind_ = Kind::Custom;
    p.space_ = space;
    p.mean_ = center;
    p.variance_ = scale;
    p.log_density_ = std::move(log_density);
    return p;
}

const EdmSpec& PriorSpec::conjugate_family() const {
    if (family_.empty()) throw std::logic_error("prior is not conjugate");
    return family_.front();
}

QuadratureConfig PriorSpec::default_config() const {
    if (kind_ == Kind::Gaussian || kind_ == Kind::GaussianMixture) {
        return QuadratureConfig::gauss_hermite(128);
    }
    return QuadratureConfig::trapezoid(4096);
}

namespace quad_detail {

namespace {

/// Christoffel-function weight exp(x^2) * w(x) = 1 / sum_k q_k(x)^2 with
/// q_k the orthonormal Hermite functions p_k(x) exp(-x^2/2). The q_k stay
/// bounded, so this is stable where eigenvector components are not.
double corrected_weight(int n, double x) {
    double q_prev = 0.0;
    double q = std::exp(-0.5 * x * x) / std::pow(kPi, 0.25);
    double sum = q * q;
    for (int k = 0; k + 1 < n; ++k) {
        const double q_next =
            x * std::sqrt(2.0 / (k + 1)) * q - std::sqrt(static_cast<double>(k) / (k + 1)) * q_prev;
        q_prev = q;
        q = q_next;
        sum += q * q;
    }
    return 1.0 / sum;
}

}  // namespace

const GhTable& gauss_hermite_table(int n) {
    static std::map<int, GhTable> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Golub-Welsch nodes: eigenvalues of the Hermite Jacobi matrix (zero
    // diagonal, off-diagonal sqrt(j/2)).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(j / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("gauss-hermite eigensolve failed");
    }
    GhTable table;
    table.x.resize(n);
    table.lambda.resize(n);
    for (int i = 0; i < n; ++i) {
        table.x[i] = solver.eigenvalues()[i];
        table.lambda[i] = corrected_weight(n, table.x[i]);
    }
    return cache.emplace(n, std::move(table)).first->second;
}

Grid build_grid(const QuadratureConfig& cfg, double center, double sd, double lo, double hi) {
    cfg.validate();
    if (!(sd > 0.0) || !(hi > lo)) throw std::invalid_argument("degenerate integration window");
    Grid grid;
    if (cfg.scheme == Scheme::AdaptiveTrapezoid) {
        const int n = cfg.node_count;
        const double h = (hi - lo) / (n - 1);
        grid.node.resize(n);
        grid.weight.resize(n);
        for (int i = 0; i < n; ++i) {
            grid.node[i] = lo + h * i;
            grid.weight[i] = h;
        }
        grid.weight.front() = 0.5 * h;
        grid.weight.back() = 0.5 * h;
        return grid;
    }
    const GhTable& table = gauss_hermite_table(cfg.node_count);
    const double s = std::sqrt(2.0) * sd;
    grid.node.reserve(table.x.size());
    grid.weight.reserve(table.x.size());
    for (size_t i = 0; i < table.x.size(); ++i) {
        const double t = center + s * table.x[i];
        if (t < lo || t > hi) continue;  // clip to the valid domain
        grid.node.push_back(t);
        grid.weight.push_back(s * table.lambda[i]);
    }
    if (grid.node.empty()) throw std::invalid_argument("gauss-hermite window excludes all nodes");
    return grid;
}

double log_weighted_sum(const Grid& grid, const std::function<double(double)>& log_f) {
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> values(grid.node.size());
    for (size_t i = 0; i < grid.node.size(); ++i) {
        values[i] = log_f(grid.node[i]);
        m = std::max(m, values[i]);
    }
    if (!std::isfinite(m)) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (size_t i = 0; i < grid.node.size(); ++i) {
        s += grid.weight[i] * std::exp(values[i] - m);
    }
    return m + std::log(s);
}

double weighted_mean(const Grid& grid, const std::function<double(double)>& log_f,
                     const std::function<double(double)>& g) {
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> values(grid.node.size());
    for (size_t i = 0; i < grid.node.size(); ++i) {
        values[i] = log_f(grid.node[i]);
        m = std::max(m, values[i]);
    }
    if (!std::isfinite(m)) throw std::underflow_error("posterior mass is numerically zero");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < grid.node.size(); ++i) {
        const double w = grid.weight[i] * std::exp(values[i] - m);
        num += w * g(grid.node[i]);
        den += w;
    }
    if (den <= 0.0) throw std::underflow_error("posterior mass is numerically zero");
    return num / den;
}

double loglik_obs(const EdmSpec& spec, double obs, double mu) {
    if (spec.family() == Family::GaussianVariance) {
        if (!(obs > 0.0)) throw std::domain_error("gaussian_variance needs obs = y^2 > 0");
        return -0.5 * (kLog2Pi + std::log(mu) + std::log(obs)) - 0.5 * obs / mu;
    }
    return log_density(spec, obs, mu);
}

double log_marginal_gaussian_prior(const EdmSpec& spec, double prior_mean, double prior_var,
                                   double obs, const Grid& grid) {
    return log_weighted_sum(grid, [&](double mu) {
        return loglik_obs(spec, obs, mu) + log_gaussian_pdf(mu, prior_mean, prior_var);
    });
}

}  // namespace quad_detail

namespace {

using quad_detail::Grid;
using quad_detail::kPositiveDomainFloor;

Grid mean_space_grid(const EdmSpec& spec, const QuadratureConfig& cfg, double center, double sd) {
    double lo = center - cfg.domain_halfwidth_sigmas * sd;
    const double hi = center + cfg.domain_halfwidth_sigmas * sd;
    if (spec.positive_mean_domain()) lo = std::max(lo, kPositiveDomainFloor);
    if (!(hi > lo)) throw std::domain_error("prior window lies outside the mean domain");
    return quad_detail::build_grid(cfg, center, sd, lo, hi);
}

Grid kernel_grid(const NefKernel& kernel, const QuadratureConfig& cfg) {
    const double mode = kernel.mode();
    const double sd = kernel.sd_at_mode();
    double lo, hi;
    expand_window([&](double t) { return kernel.log_kernel(t); }, mode, sd,
                  cfg.domain_halfwidth_sigmas, lo, hi);
    return quad_detail::build_grid(cfg, mode, sd, lo, hi);
}

double log_kernel_integral(const NefKernel& kernel, const Grid& grid) {
    return quad_detail::log_weighted_sum(grid, [&](double t) { return kernel.log_kernel(t); });
}

Grid custom_natural_grid(const EdmSpec& spec, const PriorSpec& prior, const QuadratureConfig& cfg) {
    const double center = prior.custom_center();
    const double sd = prior.custom_scale();
    double lo = center - cfg.domain_halfwidth_sigmas * sd;
    double hi = center + cfg.domain_halfwidth_sigmas * sd;
    if (natural_space_is_negative_half_line(spec)) hi = std::min(hi, -1e-12);
    if (!(hi > lo)) throw std::domain_error("prior window lies outside the natural space");
    return quad_detail::build_grid(cfg, center, sd, lo, hi);
}

double require_continuous_obs(const EdmSpec& spec, double y) {
    if (spec.family() == Family::Poisson) {
        throw unsupported_operation(
            "marginal score in the observation is not offered for discrete families");
    }
    spec.require_observation(y);
    return spec.sufficient_stat(y);
}

/// log f(obs) for mean-space priors, with component decomposition for
/// mixtures (each component integrated on its own matched grid).
double log_marginal_mean_space(const EdmSpec& spec, const PriorSpec& prior, double obs,
                               const QuadratureConfig& cfg) {
    switch (prior.kind()) {
        case PriorSpec::Kind::Gaussian: {
            const Grid grid = mean_space_grid(spec, cfg, prior.mean(), std::sqrt(prior.variance()));
            return quad_detail::log_marginal_gaussian_prior(spec, prior.mean(), prior.variance(),
                                                            obs, grid);
        }
        case PriorSpec::Kind::GaussianMixture: {
            std::vector<ComponentMoment> parts;
            for (size_t k = 0; k < prior.weights().size(); ++k) {
                const double m = prior.means()[k];
                const double v = prior.variances()[k];
                const Grid grid = mean_space_grid(spec, cfg, m, std::sqrt(v));
                ComponentMoment part;
                part.log_mass = std::log(prior.weights()[k])
                                + quad_detail::log_marginal_gaussian_prior(spec, m, v, obs, grid);
                part.mean = 0.0;
                parts.push_back(part);
            }
            return combine_log_masses(parts);
        }
        case PriorSpec::Kind::Custom: {
            const Grid grid = mean_space_grid(spec, cfg, prior.custom_center(), prior.custom_scale());
            return quad_detail::log_weighted_sum(grid, [&](double mu) {
                return quad_detail::loglik_obs(spec, obs, mu) + prior.custom_log_density(mu);
            });
        }
        case PriorSpec::Kind::ConjugateNef:
            break;
    }
    throw std::logic_error("not a mean-space prior");
}

double log_marginal_conjugate(const EdmSpec& spec, const PriorSpec& prior, double obs,
                              const QuadratureConfig& cfg) {
    const NefKernel posterior = NefKernel::make(spec, prior.tau() + obs, prior.n() + 1.0);
    const NefKernel normalizer = NefKernel::make(spec, prior.tau(), prior.n());
    const double log_post = log_kernel_integral(posterior, kernel_grid(posterior, cfg));
    const double log_norm = log_kernel_integral(normalizer, kernel_grid(normalizer, cfg));
    return log_base_measure(spec, obs) + log_post - log_norm;
}

double log_marginal_custom_natural(const EdmSpec& spec, const PriorSpec& prior, double obs,
                                   const QuadratureConfig& cfg) {
    const Grid grid = custom_natural_grid(spec, prior, cfg);
    return log_base_measure(spec, obs)
           + quad_detail::log_weighted_sum(grid, [&](double theta) {
                 return obs * theta - spec.psi(theta) + prior.custom_log_density(theta);
             });
}

double log_marginal_obs(const EdmSpec& spec, const PriorSpec& prior, double obs,
                        const QuadratureConfig& cfg) {
    if (prior.kind() == PriorSpec::Kind::ConjugateNef) {
        if (prior.conjugate_family().family() != spec.family()) {
            throw std::invalid_argument("conjugate prior family does not match the likelihood");
        }
        return log_marginal_conjugate(spec, prior, obs, cfg);
    }
    if (prior.space() == ParamSpace::Natural) {
        return log_marginal_custom_natural(spec, prior, obs, cfg);
    }
    return log_marginal_mean_space(spec, prior, obs, cfg);
}

}  // namespace

double marginal_density(const EdmSpec& spec, const PriorSpec& prior, double y,
                        const QuadratureConfig& cfg) {
    cfg.validate();
    spec.require_observation(y);
    const double obs = spec.sufficient_stat(y);
    const double log_f = log_marginal_obs(spec, prior, obs, cfg);
    const double f = std::exp(log_f);
    if (!(f > 0.0) || !std::isfinite(f)) {
        throw std::underflow_error("marginal density is numerically zero");
    }
    return f;
}

double marginal_score(const EdmSpec& spec, const PriorSpec& prior, double y,
                      const QuadratureConfig& cfg) {
    cfg.validate();
    const double obs = require_continuous_obs(spec, y);
    const double eps = cfg.fd_step;
    if (spec.positive_mean_domain() && spec.family() != Family::GaussianLocation
        && obs - eps <= 0.0) {
        throw std::domain_error("observation too close to the support boundary for fd");
    }

    if (prior.kind() == PriorSpec::Kind::ConjugateNef) {
        // d/dobs log f = d/dobs log h + d/da log I(a, b) at a = tau + obs,
        // with one fixed grid across the +/- evaluations.
        const NefKernel center = NefKernel::make(spec, prior.tau() + obs, prior.n() + 1.0);
        const Grid grid = kernel_grid(center, cfg);
        NefKernel plus = center, minus = center;
        plus.a += eps;
        minus.a -= eps;
        const double slope =
            (log_kernel_integral(plus, grid) - log_kernel_integral(minus, grid)) / (2.0 * eps);
        return base_measure_score(spec, obs) + slope;
    }
    if (prior.space() == ParamSpace::Natural) {
        const Grid grid = custom_natural_grid(spec, prior, cfg);
        auto log_int = [&](double o) {
            return quad_detail::log_weighted_sum(grid, [&](double theta) {
                return o * theta - spec.psi(theta) + prior.custom_log_density(theta);
            });
        };
        return base_measure_score(spec, obs)
               + (log_int(obs + eps) - log_int(obs - eps)) / (2.0 * eps);
    }
    // Mean-space priors: the integration grids do not depend on obs.
    const double lp = log_marginal_mean_space(spec, prior, obs + eps, cfg);
    const double lm = log_marginal_mean_space(spec, prior, obs - eps, cfg);
    if (!std::isfinite(lp) || !std::isfinite(lm)) {
        throw std::underflow_error("marginal density is numerically zero");
    }
    return (lp - lm) / (2.0 * eps);
}

double posterior_expectation_of_mean_function(const EdmSpec& spec, const PriorSpec& prior,
                                              double y, const QuadratureConfig& cfg,
                                              const std::function<double(double)>& g) {
    cfg.validate();
    if (prior.space() != ParamSpace::Mean) {
        throw std::invalid_argument("posterior_expectation_of_mean_function needs a mean-space prior");
    }
    spec.require_observation(y);
    const double obs = spec.sufficient_stat(y);
    switch (prior.kind()) {
        case PriorSpec::Kind::Gaussian: {
            const Grid grid = mean_space_grid(spec, cfg, prior.mean(), std::sqrt(prior.variance()));
            return quad_detail::weighted_mean(
                grid,
                [&](double mu) {
                    return quad_detail::loglik_obs(spec, obs, mu)
                           + log_gaussian_pdf(mu, prior.mean(), prior.variance());
                },
                g);
        }
        case PriorSpec::Kind::GaussianMixture: {
            std::vector<ComponentMoment> parts;
            for (size_t k = 0; k < prior.weights().size(); ++k) {
                const double m = prior.means()[k];
                const double v = prior.variances()[k];
                const Grid grid = mean_space_grid(spec, cfg, m, std::sqrt(v));
                auto log_f = [&](double mu) {
                    return quad_detail::loglik_obs(spec, obs, mu) + log_gaussian_pdf(mu, m, v);
                };
                ComponentMoment part;
                part.log_mass = std::log(prior.weights()[k])
                                + quad_detail::log_weighted_sum(grid, log_f);
                part.mean = std::isfinite(part.log_mass)
                                ? quad_detail::weighted_mean(grid, log_f, g)
                                : 0.0;
                parts.push_back(part);
            }
            return combine_means(parts);
        }
        case PriorSpec::Kind::Custom: {
            const Grid grid = mean_space_grid(spec, cfg, prior.custom_center(), prior.custom_scale());
            return quad_detail::weighted_mean(
                grid,
                [&](double mu) {
                    return quad_detail::loglik_obs(spec, obs, mu) + prior.custom_log_density(mu);
                },
                g);
        }
        case PriorSpec::Kind::ConjugateNef:
            break;
    }
    throw std::logic_error("unhandled prior kind");
}

double posterior_mean_oracle(const EdmSpec& spec, const PriorSpec& prior, double y,
                             const QuadratureConfig& cfg, Target target) {
    cfg.validate();
    spec.require_observation(y);
    const double obs = spec.sufficient_stat(y);

    if (prior.kind() == PriorSpec::Kind::ConjugateNef) {
        const NefKernel kernel = NefKernel::make(spec, prior.tau() + obs, prior.n() + 1.0);
        const Grid grid = kernel_grid(kernel, cfg);
        auto g = [&](double t) {
            const double theta = kernel.theta_of(t);
            return target == Target::Theta ? theta : spec.psi_prime(theta);
        };
        return quad_detail::weighted_mean(
            grid, [&](double t) { return kernel.log_kernel(t); }, g);
    }
    if (prior.space() == ParamSpace::Natural) {
        const Grid grid = custom_natural_grid(spec, prior, cfg);
        auto log_f = [&](double theta) {
            return obs * theta - spec.psi(theta) + prior.custom_log_density(theta);
        };
        auto g = [&](double theta) {
            return target == Target::Theta ? theta : spec.psi_prime(theta);
        };
        return quad_detail::weighted_mean(grid, log_f, g);
    }

    return posterior_expectation_of_mean_function(spec, prior, y, cfg, [&](double mu) {
        return target == Target::Mu ? mu : natural_from_mean(spec, mu);
    });
}

}  // namespace sdfilter
