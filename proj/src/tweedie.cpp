#include "sdfilter/tweedie.hpp"

#include <cmath>
#include <vector>

namespace sdfilter {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_gaussian_pdf(double x, double mean, double var) {
    const double r = x - mean;
    return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * r * r / var;
}

/// d/dmu log pi(mu) for Gaussian and mixture priors on the mean.
double mean_prior_score(const PriorSpec& prior, double mu) {
    if (prior.kind() == PriorSpec::Kind::Gaussian) {
        return -(mu - prior.mean()) / prior.variance();
    }
    const auto& w = prior.weights();
    const auto& m = prior.means();
    const auto& v = prior.variances();
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(w.size());
    for (size_t k = 0; k < w.size(); ++k) {
        logs[k] = std::log(w[k]) + log_gaussian_pdf(mu, m[k], v[k]);
        max_log = std::max(max_log, logs[k]);
    }
    double den = 0.0, num = 0.0;
    for (size_t k = 0; k < w.size(); ++k) {
        const double r = std::exp(logs[k] - max_log);
        den += r;
        num += r * (-(mu - m[k]) / v[k]);
    }
    return num / den;
}

}  // namespace

double tweedie_gaussian(double y, double sigma2, double marginal_score_at_y) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    return y + sigma2 * marginal_score_at_y;
}

double tweedie_gaussian_noise(double sigma2, double marginal_score_at_y) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    return -sigma2 * marginal_score_at_y;
}

double tweedie_nef_natural(const EdmSpec& spec, double y, double marginal_score_at_y) {
    if (spec.family() == Family::Poisson) {
        throw unsupported_operation(
            "observation-space Tweedie identity is not offered for discrete families");
    }
    return marginal_score_at_y - base_measure_score(spec, y);
}

double nef_expectation_posterior(const EdmSpec& spec, const PriorSpec& prior, double y,
                                 const QuadratureConfig& cfg) {
    spec.require_observation(y);
    const double obs = spec.sufficient_stat(y);
    if (prior.kind() == PriorSpec::Kind::ConjugateNef) {
        if (prior.conjugate_family().family() != spec.family()) {
            throw std::invalid_argument("conjugate prior family does not match the likelihood");
        }
        return (prior.tau() + obs) / (prior.n() + 1.0);
    }
    return nef_expectation_posterior_quadrature(spec, prior, y, cfg);
}

double nef_expectation_posterior_quadrature(const EdmSpec& spec, const PriorSpec& prior, double y,
                                            const QuadratureConfig& cfg) {
    spec.require_observation(y);
    const double obs = spec.sufficient_stat(y);

    if (prior.kind() == PriorSpec::Kind::ConjugateNef) {
        // d/dtheta log pi = tau - n * psi'(theta), linear in mu.
        const double mu_post = posterior_mean_oracle(spec, prior, y, cfg, Target::Mu);
        return obs + prior.tau() - prior.n() * mu_post;
    }
    if (spec.family() == Family::GaussianLocation
        && (prior.kind() == PriorSpec::Kind::Gaussian
            || prior.kind() == PriorSpec::Kind::GaussianMixture)) {
        // theta = mu / sigma^2 is linear, so the theta-space prior score is
        // sigma^2 times the mu-space prior score.
        const double sigma2 = spec.phi();
        const double expected_score = posterior_expectation_of_mean_function(
            spec, prior, y, cfg,
            [&](double mu) { return sigma2 * mean_prior_score(prior, mu); });
        return obs + expected_score;
    }
    throw unsupported_operation(
        "expectation-parameter identity needs a prior with a theta-space density");
}

std::string identity_name(IdentityId id) {
    switch (id) {
        case IdentityId::GaussianTweedie: return "GaussianTweedie";
        case IdentityId::NefNatural: return "NefNatural";
        case IdentityId::NefExpectation: return "NefExpectation";
        case IdentityId::ParameterSpaceTweedie: return "ParameterSpaceTweedie";
    }
    throw std::invalid_argument("unknown identity");
}

IdentityReport IdentityReport::make(IdentityId id, double lhs, double rhs, double tolerance) {
    IdentityReport r;
    r.identity_id = id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_gap = std::abs(lhs - rhs);
    r.tolerance = tolerance;
    r.pass = r.abs_gap <= tolerance;
    return r;
}

}  // namespace sdfilter
