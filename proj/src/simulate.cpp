#include "sdfilter/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace sdfilter {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

double Rng::uniform() {
    // Top 53 bits mapped to (0, 1]; never returns 0 so logs stay finite.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_normal_) {
        have_spare_normal_ = false;
        return spare_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_normal_ = r * std::sin(kTwoPi * u2);
    have_spare_normal_ = true;
    return r * std::cos(kTwoPi * u2);
}

double Rng::poisson(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("poisson mean must be positive and finite");
    }
    // Additivity: split large means into chunks counted by unit-exponential
    // arrivals, which keeps the expected draw count bounded per chunk.
    double count = 0.0;
    while (mean > 64.0) {
        count += poisson(mean / 2.0);
        mean /= 2.0;
    }
    double time = 0.0;
    while (true) {
        time += -std::log(uniform());
        if (time > mean) break;
        count += 1.0;
    }
    return count;
}

double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw std::invalid_argument("gamma shape and scale must be positive");
    }
    if (shape < 1.0) {
        // Boost: Gamma(shape) = Gamma(shape + 1) * U^(1/shape).
        const double u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

void SimConfig::validate() const {
    if (length < 1) throw std::invalid_argument("simulation length must be >= 1");
    if (std::holds_alternative<Garch11Dgp>(dgp)) {
        const auto& g = std::get<Garch11Dgp>(dgp);
        if (!(g.omega_g > 0.0) || g.alpha_g < 0.0 || g.beta_g < 0.0) {
            throw std::invalid_argument("garch11 needs omega_G > 0, alpha_G >= 0, beta_G >= 0");
        }
        if (!(g.alpha_g + g.beta_g < 1.0)) {
            throw std::invalid_argument("garch11 needs alpha_G + beta_G < 1");
        }
    } else if (std::holds_alternative<NefConstantDgp>(dgp)) {
        const auto& c = std::get<NefConstantDgp>(dgp);
        const EdmSpec spec = edm_from_family(c.family, c.phi);
        if (!spec.mean_in_domain(c.mu)) {
            throw std::invalid_argument("constant mean outside the family's mean domain");
        }
    } else if (std::holds_alternative<NefRandomWalkMeanDgp>(dgp)) {
        const auto& rw = std::get<NefRandomWalkMeanDgp>(dgp);
        if (!(rw.step_sd > 0.0)) throw std::invalid_argument("step_sd must be positive");
        edm_from_family(rw.family, rw.phi);
    } else {
        const auto& ll = std::get<GaussianLocalLevelDgp>(dgp);
        if (!(ll.state_var > 0.0) || !(ll.obs_var > 0.0)) {
            throw std::invalid_argument("local level variances must be positive");
        }
    }
}

double garch11_unconditional_variance(const Garch11Dgp& dgp) {
    return dgp.omega_g / (1.0 - dgp.alpha_g - dgp.beta_g);
}

namespace {

double draw_observation(Rng& rng, const EdmSpec& spec, double mu) {
    switch (spec.family()) {
        case Family::GaussianLocation: return mu + std::sqrt(spec.phi()) * rng.normal();
        case Family::GaussianVariance: return std::sqrt(mu) * rng.normal();
        case Family::Poisson: return rng.poisson(mu);
        case Family::Gamma: {
            const double shape = 1.0 / spec.phi();
            return rng.gamma(shape, mu / shape);
        }
    }
    throw std::invalid_argument("unknown family");
}

SimResult simulate_garch(const Garch11Dgp& dgp, std::size_t length, Rng& rng) {
    SimResult out;
    out.y.reserve(length);
    out.latent.emplace();
    out.latent->reserve(length);
    double h = garch11_unconditional_variance(dgp);
    for (std::size_t t = 0; t < kGarchBurnIn + length; ++t) {
        const double y = std::sqrt(h) * rng.normal();
        if (t >= kGarchBurnIn) {
            out.y.push_back(y);
            out.latent->push_back(h);
        }
        h = dgp.omega_g + dgp.alpha_g * y * y + dgp.beta_g * h;
    }
    return out;
}

SimResult simulate_nef_constant(const NefConstantDgp& dgp, std::size_t length, Rng& rng) {
    const EdmSpec spec = edm_from_family(dgp.family, dgp.phi);
    SimResult out;
    out.y.reserve(length);
    for (std::size_t t = 0; t < length; ++t) out.y.push_back(draw_observation(rng, spec, dgp.mu));
    return out;
}

SimResult simulate_nef_random_walk(const NefRandomWalkMeanDgp& dgp, std::size_t length, Rng& rng) {
    const EdmSpec spec = edm_from_family(dgp.family, dgp.phi);
    SimResult out;
    out.y.reserve(length);
    out.latent.emplace();
    out.latent->reserve(length);
    // Additive walk for the Gaussian location mean, log-scale walk on
    // positive mean domains. Starting values 0 and 1 respectively.
    const bool log_walk = spec.positive_mean_domain();
    double mu = log_walk ? 1.0 : 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        out.latent->push_back(mu);
        out.y.push_back(draw_observation(rng, spec, mu));
        const double step = dgp.step_sd * rng.normal();
        mu = log_walk ? mu * std::exp(step) : mu + step;
    }
    return out;
}

SimResult simulate_local_level(const GaussianLocalLevelDgp& dgp, std::size_t length, Rng& rng) {
    SimResult out;
    out.y.reserve(length);
    out.latent.emplace();
    out.latent->reserve(length);
    double mu = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        out.latent->push_back(mu);
        out.y.push_back(mu + std::sqrt(dgp.obs_var) * rng.normal());
        mu += std::sqrt(dgp.state_var) * rng.normal();
    }
    return out;
}

}  // namespace

SimResult simulate(const SimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    if (std::holds_alternative<Garch11Dgp>(cfg.dgp)) {
        return simulate_garch(std::get<Garch11Dgp>(cfg.dgp), cfg.length, rng);
    }
    if (std::holds_alternative<NefConstantDgp>(cfg.dgp)) {
        return simulate_nef_constant(std::get<NefConstantDgp>(cfg.dgp), cfg.length, rng);
    }
    if (std::holds_alternative<NefRandomWalkMeanDgp>(cfg.dgp)) {
        return simulate_nef_random_walk(std::get<NefRandomWalkMeanDgp>(cfg.dgp), cfg.length, rng);
    }
    return simulate_local_level(std::get<GaussianLocalLevelDgp>(cfg.dgp), cfg.length, rng);
}

}  // namespace sdfilter
