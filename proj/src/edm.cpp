#include "sdfilter/edm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sdfilter {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double expected_tweedie_index(Family f) {
    switch (f) {
        case Family::GaussianLocation: return 0.0;
        case Family::Poisson: return 1.0;
        case Family::Gamma: return 2.0;
        case Family::GaussianVariance: return 2.0;
    }
    throw std::invalid_argument("unknown family");
}

bool is_integer(double y) { return std::isfinite(y) && y == std::floor(y); }

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::GaussianLocation: return "gaussian_location";
        case Family::GaussianVariance: return "gaussian_variance";
        case Family::Poisson: return "poisson";
        case Family::Gamma: return "gamma";
    }
    throw std::invalid_argument("unknown family");
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian_location" || name == "gaussian-location") return Family::GaussianLocation;
    if (name == "gaussian_variance" || name == "gaussian-variance") return Family::GaussianVariance;
    if (name == "poisson") return Family::Poisson;
    if (name == "gamma") return Family::Gamma;
    throw std::invalid_argument("unknown family name: " + name);
}

EdmSpec::EdmSpec(Family family, double phi, double p) : family_(family), phi_(phi), p_(p) {
    if (!(phi > 0.0) || !std::isfinite(phi)) {
        throw std::invalid_argument("dispersion phi must be positive and finite");
    }
    if (p != expected_tweedie_index(family)) {
        std::ostringstream msg;
        msg << "tweedie index " << p << " inconsistent with family " << family_name(family);
        throw std::invalid_argument(msg.str());
    }
}

EdmSpec EdmSpec::gaussian_location(double sigma2) {
    return EdmSpec(Family::GaussianLocation, sigma2, 0.0);
}

EdmSpec EdmSpec::gaussian_variance() {
    // X = Y^2 has variance 2 h^2, so the squared-data EDM has phi = 2.
    return EdmSpec(Family::GaussianVariance, 2.0, 2.0);
}

EdmSpec EdmSpec::poisson() { return EdmSpec(Family::Poisson, 1.0, 1.0); }

EdmSpec EdmSpec::gamma(double phi) { return EdmSpec(Family::Gamma, phi, 2.0); }

EdmSpec edm_from_family(Family f, double phi) {
    switch (f) {
        case Family::GaussianLocation: return EdmSpec::gaussian_location(phi);
        case Family::GaussianVariance: return EdmSpec::gaussian_variance();
        case Family::Poisson: return EdmSpec::poisson();
        case Family::Gamma: return EdmSpec::gamma(phi);
    }
    throw std::invalid_argument("unknown family");
}

double EdmSpec::variance_function(double mu) const {
    if (p_ == 0.0) return 1.0;
    if (p_ == 1.0) return mu;
    if (p_ == 2.0) return mu * mu;
    return std::pow(mu, p_);
}

bool EdmSpec::mean_in_domain(double mu) const {
    if (!std::isfinite(mu)) return false;
    if (family_ == Family::GaussianLocation) return true;
    return mu > 0.0;
}

bool EdmSpec::natural_in_domain(double theta) const {
    if (!std::isfinite(theta)) return false;
    switch (family_) {
        case Family::GaussianLocation:
        case Family::Poisson: return true;
        case Family::Gamma:
        case Family::GaussianVariance: return theta < 0.0;
    }
    return false;
}

double EdmSpec::sufficient_stat(double y) const {
    return family_ == Family::GaussianVariance ? y * y : y;
}

bool EdmSpec::observation_in_support(double y) const {
    if (!std::isfinite(y)) return false;
    switch (family_) {
        case Family::GaussianLocation: return true;
        case Family::GaussianVariance: return true;
        case Family::Poisson: return y >= 0.0 && is_integer(y);
        case Family::Gamma: return y > 0.0;
    }
    return false;
}

bool EdmSpec::positive_mean_domain() const { return family_ != Family::GaussianLocation; }

void EdmSpec::require_mean(double mu) const {
    if (!mean_in_domain(mu)) {
        std::ostringstream msg;
        msg << "mean " << mu << " outside the open mean domain of " << family_name(family_);
        throw std::domain_error(msg.str());
    }
}

void EdmSpec::require_observation(double y) const {
    if (!observation_in_support(y)) {
        std::ostringstream msg;
        msg << "observation " << y << " outside the support of " << family_name(family_);
        throw std::domain_error(msg.str());
    }
}

double EdmSpec::psi(double theta) const {
    switch (family_) {
        case Family::GaussianLocation: return 0.5 * phi_ * theta * theta;
        case Family::Poisson: return std::exp(theta);
        case Family::Gamma:
        case Family::GaussianVariance: return -(1.0 / phi_) * std::log(-theta);
    }
    throw std::invalid_argument("unknown family");
}

double EdmSpec::psi_prime(double theta) const {
    switch (family_) {
        case Family::GaussianLocation: return phi_ * theta;
        case Family::Poisson: return std::exp(theta);
        case Family::Gamma:
        case Family::GaussianVariance: return -(1.0 / phi_) / theta;
    }
    throw std::invalid_argument("unknown family");
}

double EdmSpec::psi_double_prime(double theta) const {
    switch (family_) {
        case Family::GaussianLocation: return phi_;
        case Family::Poisson: return std::exp(theta);
        case Family::Gamma:
        case Family::GaussianVariance: return (1.0 / phi_) / (theta * theta);
    }
    throw std::invalid_argument("unknown family");
}

double mean_from_natural(const EdmSpec& spec, double theta) {
    if (!spec.natural_in_domain(theta)) {
        throw std::domain_error("natural parameter outside the family's natural space");
    }
    return spec.psi_prime(theta);
}

double natural_from_mean(const EdmSpec& spec, double mu) {
    spec.require_mean(mu);
    switch (spec.family()) {
        case Family::GaussianLocation: return mu / spec.phi();
        case Family::Poisson: return std::log(mu);
        case Family::Gamma:
        case Family::GaussianVariance: return -(1.0 / spec.phi()) / mu;
    }
    throw std::invalid_argument("unknown family");
}

double score_mean(const EdmSpec& spec, double y, double mu) {
    spec.require_mean(mu);
    spec.require_observation(y);
    return (spec.sufficient_stat(y) - mu) / (spec.phi() * spec.variance_function(mu));
}

double fisher_mean(const EdmSpec& spec, double mu) {
    spec.require_mean(mu);
    return 1.0 / (spec.phi() * spec.variance_function(mu));
}

double scaled_score(const EdmSpec& spec, double y, double mu, double d) {
    const double s = score_mean(spec, y, mu);
    if (d == 0.0) return s;
    const double info = fisher_mean(spec, mu);
    if (d == 1.0) return s / info;
    return std::pow(info, -d) * s;
}

double score_link(const EdmSpec& spec, double y, double mu, Link link) {
    if (link == Link::Identity) return score_mean(spec, y, mu);
    if (!(mu > 0.0)) throw std::domain_error("log link requires a positive mean");
    return mu * score_mean(spec, y, mu);
}

double fisher_link(const EdmSpec& spec, double mu, Link link) {
    if (link == Link::Identity) return fisher_mean(spec, mu);
    if (!(mu > 0.0)) throw std::domain_error("log link requires a positive mean");
    return mu * mu * fisher_mean(spec, mu);
}

double log_density(const EdmSpec& spec, double y, double mu) {
    spec.require_mean(mu);
    spec.require_observation(y);
    switch (spec.family()) {
        case Family::GaussianLocation: {
            const double r = y - mu;
            return -0.5 * (kLog2Pi + std::log(spec.phi())) - 0.5 * r * r / spec.phi();
        }
        case Family::Poisson:
            return y * std::log(mu) - mu - std::lgamma(y + 1.0);
        case Family::Gamma: {
            const double k = 1.0 / spec.phi();
            return k * std::log(k / mu) + (k - 1.0) * std::log(y) - k * y / mu - std::lgamma(k);
        }
        case Family::GaussianVariance: {
            // Gamma(shape 1/2, mean mu) density of x = y^2: exp(-x/(2 mu)) / sqrt(2 pi mu x).
            const double x = y * y;
            if (!(x > 0.0)) {
                throw std::domain_error("gaussian_variance log density needs y != 0");
            }
            return -0.5 * (kLog2Pi + std::log(mu) + std::log(x)) - 0.5 * x / mu;
        }
    }
    throw std::invalid_argument("unknown family");
}

double base_measure_score(const EdmSpec& spec, double y) {
    switch (spec.family()) {
        case Family::GaussianLocation:
            return -y / spec.phi();
        case Family::Gamma:
            spec.require_observation(y);
            return (1.0 / spec.phi() - 1.0) / y;
        case Family::GaussianVariance: {
            // Argument is the sufficient statistic x = y^2; h(x) = 1/sqrt(pi x).
            if (!(y > 0.0)) throw std::domain_error("base measure score needs x > 0");
            return -0.5 / y;
        }
        case Family::Poisson:
            throw unsupported_operation(
                "base measure score is undefined for discrete families (poisson)");
    }
    throw std::invalid_argument("unknown family");
}

}  // namespace sdfilter
