#pragma once

#include <string>

#include "sdfilter/edm.hpp"
#include "sdfilter/quadrature.hpp"

namespace sdfilter {

/// Posterior mean of the Gaussian location signal: y + sigma^2 * d/dy log f(y).
double tweedie_gaussian(double y, double sigma2, double marginal_score_at_y);

/// Posterior mean of the noise, -sigma^2 * d/dy log f(y).
double tweedie_gaussian_noise(double sigma2, double marginal_score_at_y);

/// Posterior mean of the natural parameter for continuous NEF observations:
/// marginal score minus the base-measure score d/dy log h(y). For
/// GaussianVariance y is the sufficient statistic x. Unsupported for Poisson.
double tweedie_nef_natural(const EdmSpec& spec, double y, double marginal_score_at_y);

/// Posterior mean of the expectation parameter, E(mu | y) = y + E(d/dtheta
/// log pi(theta) | y). Conjugate priors use the closed form (tau + y)/(n + 1);
/// other priors go through the quadrature form below.
double nef_expectation_posterior(const EdmSpec& spec, const PriorSpec& prior, double y,
                                 const QuadratureConfig& cfg);

/// General quadrature form of the identity above, available for priors with
/// a theta-space density: ConjugateNef, and (for GaussianLocation) Gaussian /
/// mixture priors mapped through the linear mu <-> theta change of variables.
double nef_expectation_posterior_quadrature(const EdmSpec& spec, const PriorSpec& prior, double y,
                                            const QuadratureConfig& cfg);

enum class IdentityId { GaussianTweedie, NefNatural, NefExpectation, ParameterSpaceTweedie };

std::string identity_name(IdentityId id);

/// One verified identity instance: lhs is the identity value, rhs the
/// independent oracle, pass <=> abs_gap <= tolerance.
struct IdentityReport {
    IdentityId identity_id = IdentityId::GaussianTweedie;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_gap = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    static IdentityReport make(IdentityId id, double lhs, double rhs, double tolerance);
};

}  // namespace sdfilter
