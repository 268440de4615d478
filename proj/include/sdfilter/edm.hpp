#pragma once

#include <string>

#include "sdfilter/errors.hpp"

namespace sdfilter {

enum class Family {
    GaussianLocation,  // Y ~ N(mu, phi), V(mu) = 1, p = 0
    GaussianVariance,  // Y ~ N(0, h); filtered through X = Y^2 ~ Gamma(1/2, mean h), p = 2
    Poisson,           // Y ~ Poisson(mu), V(mu) = mu, p = 1
    Gamma,             // Y ~ Gamma(shape 1/phi, mean mu), V(mu) = mu^2, p = 2
};

enum class Link { Identity, Log };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// One-parameter exponential dispersion model with power variance function
/// V(mu) = mu^p and fixed, known dispersion phi. The conditional variance of
/// the observation (of the sufficient statistic for GaussianVariance) is
/// phi * V(mu).
///
/// GaussianVariance is the Gamma(shape 1/2, mean h) model for X = Y^2; every
/// operation below takes the raw observation y and squares it internally.
class EdmSpec {
  public:
    static EdmSpec gaussian_location(double sigma2);
    static EdmSpec gaussian_variance();
    static EdmSpec poisson();
    static EdmSpec gamma(double phi);

    Family family() const { return family_; }
    double phi() const { return phi_; }
    double tweedie_index() const { return p_; }

    /// Power variance function V(mu) = mu^p, with 0^0 = 1 for the Gaussian case.
    double variance_function(double mu) const;

    /// Open interval of valid means; operations reject boundary values.
    bool mean_in_domain(double mu) const;
    /// Natural parameter space: R for GaussianLocation/Poisson, (-inf, 0) otherwise.
    bool natural_in_domain(double theta) const;

    /// NEF observation entering the score: y itself, or y^2 for GaussianVariance.
    double sufficient_stat(double y) const;
    /// True when y is a valid raw observation for score/filter operations.
    bool observation_in_support(double y) const;
    bool positive_mean_domain() const;

    void require_mean(double mu) const;
    void require_observation(double y) const;

    // Cumulant function of the natural parameterization (phi absorbed, so
    // psi''(theta) = phi * V(mu) is the full conditional variance).
    double psi(double theta) const;
    double psi_prime(double theta) const;
    double psi_double_prime(double theta) const;

  private:
    EdmSpec(Family family, double phi, double p);

    Family family_;
    double phi_;
    double p_;
};

EdmSpec edm_from_family(Family f, double phi);

/// mu = psi'(theta); strictly increasing in theta.
double mean_from_natural(const EdmSpec& spec, double theta);
/// Inverse of mean_from_natural (d theta / d mu = 1 / V(mu) up to dispersion).
double natural_from_mean(const EdmSpec& spec, double mu);

/// Conditional score in mean parameterization, (x - mu) / (phi V(mu)) with x
/// the NEF observation.
double score_mean(const EdmSpec& spec, double y, double mu);
/// Fisher information in mean parameterization, 1 / (phi V(mu)).
double fisher_mean(const EdmSpec& spec, double mu);
/// fisher_mean(mu)^(-d) * score_mean(y, mu). d = 1 recovers the raw
/// innovation x - mu; d = 0 is the unscaled score; d = 1/2 standardizes it.
double scaled_score(const EdmSpec& spec, double y, double mu, double d);

/// Score with respect to the link-transformed parameter eta: the mean score
/// for the identity link, mu * score_mean for the log link.
double score_link(const EdmSpec& spec, double y, double mu, Link link);
/// Fisher information for the link-transformed parameter: fisher_mean for the
/// identity link, mu^2 * fisher_mean for the log link.
double fisher_link(const EdmSpec& spec, double mu, Link link);

/// Exact per-family log density. For GaussianVariance this is the
/// Gamma(shape 1/2, mean h) density of the sufficient statistic y^2.
double log_density(const EdmSpec& spec, double y, double mu);

/// d/dy log h(y) of the NEF base measure, in closed form. For
/// GaussianVariance the argument is the sufficient statistic x = y^2.
/// Unsupported for Poisson (discrete base measure).
double base_measure_score(const EdmSpec& spec, double y);

}  // namespace sdfilter
