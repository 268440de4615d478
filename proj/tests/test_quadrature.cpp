#include <doctest.h>

#include <cmath>
#include <random>

#include "sdfilter/quadrature.hpp"
#include "support.hpp"

using namespace sdfilter;
using namespace testsupport;

namespace {

const QuadratureConfig kGh = QuadratureConfig::gauss_hermite(128);
const QuadratureConfig kTrap = QuadratureConfig::trapezoid(4096);

}  // namespace

TEST_CASE("config validation") {
    QuadratureConfig cfg;
    cfg.node_count = 8;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = QuadratureConfig::gauss_hermite(512);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = QuadratureConfig::trapezoid();
    cfg.fd_step = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(QuadratureConfig::trapezoid().validate());
}

TEST_CASE("gaussian-prior marginal density matches the convolution closed form") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    const PriorSpec prior = PriorSpec::gaussian(0.0, 1.0);
    for (const auto& cfg : {kGh, kTrap}) {
        CHECK(marginal_density(spec, prior, 0.0, cfg)
              == doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-9));
        CHECK(marginal_density(spec, prior, 2.0, cfg)
              == doctest::Approx(normal_pdf(2.0, 0.0, 2.0)).epsilon(1e-9));
    }
}

TEST_CASE("poisson conjugate marginal is negative binomial") {
    const EdmSpec spec = EdmSpec::poisson();
    const PriorSpec prior = PriorSpec::conjugate_nef(2.0, 1.0, spec);
    // NB(r = 2, n = 1) pmf at 3 is 4 / 32 = 0.125.
    CHECK(neg_binomial_pmf(3.0, 2.0, 1.0) == doctest::Approx(0.125).epsilon(1e-12));
    for (const auto& cfg : {kGh, kTrap}) {
        for (double y : {0.0, 1.0, 3.0, 7.0}) {
            CHECK(marginal_density(spec, prior, y, cfg)
                  == doctest::Approx(neg_binomial_pmf(y, 2.0, 1.0)).epsilon(1e-8));
        }
    }
}

TEST_CASE("poisson conjugate marginal mass sums to one") {
    const EdmSpec spec = EdmSpec::poisson();
    const PriorSpec prior = PriorSpec::conjugate_nef(3.0, 0.5, spec);
    double total = 0.0;
    for (int y = 0; y < 400; ++y) total += marginal_density(spec, prior, y, kTrap);
    CHECK(std::abs(total - 1.0) <= 1e-8);
}

TEST_CASE("gamma conjugate marginal density integrates to one") {
    // The compound-gamma marginal has a polynomial tail, so the window must
    // reach far out: here f(y) ~ y^(-6) and mass beyond 400 is ~2e-9.
    const EdmSpec spec = EdmSpec::gamma(0.5);
    const PriorSpec prior = PriorSpec::conjugate_nef(6.0, 2.0, spec);
    const double total = simpson(
        [&](double y) { return marginal_density(spec, prior, y, kTrap); }, 1e-9, 400.0, 40000);
    CHECK(std::abs(total - 1.0) <= 1e-7);

    // Against the closed form 233280 y / (6 + y)^7 at a few points.
    for (double y : {0.5, 2.0, 6.0, 15.0}) {
        const double closed = 233280.0 * y / std::pow(6.0 + y, 7.0);
        CHECK(marginal_density(spec, prior, y, kTrap) == doctest::Approx(closed).epsilon(1e-9));
    }
}

TEST_CASE("marginal scores") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    const PriorSpec prior = PriorSpec::gaussian(0.0, 1.0);
    CHECK(marginal_score(spec, prior, 2.0, kGh) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(marginal_score(spec, prior, 0.0, kGh) == doctest::Approx(0.0).epsilon(1e-7));

    const PriorSpec mix = PriorSpec::gaussian_mixture({0.5, 0.5}, {-2.0, 2.0}, {0.25, 0.25});
    const double oracle = mixture_log_density_score(1.0, {0.5, 0.5}, {-2.0, 2.0}, {1.25, 1.25});
    for (const auto& cfg : {kGh, kTrap}) {
        CHECK(marginal_score(spec, mix, 1.0, cfg) == doctest::Approx(oracle).epsilon(1e-7));
    }

    CHECK_THROWS_AS(marginal_score(EdmSpec::poisson(),
                                   PriorSpec::conjugate_nef(2.0, 1.0, EdmSpec::poisson()), 3.0,
                                   kTrap),
                    unsupported_operation);
}

TEST_CASE("posterior mean oracle on conjugate cases") {
    const EdmSpec gauss = EdmSpec::gaussian_location(1.0);
    CHECK(posterior_mean_oracle(gauss, PriorSpec::gaussian(0.0, 1.0), 2.0, kGh, Target::Mu)
          == doctest::Approx(1.0).epsilon(1e-9));
    const EdmSpec poisson = EdmSpec::poisson();
    CHECK(posterior_mean_oracle(poisson, PriorSpec::conjugate_nef(2.0, 1.0, poisson), 3.0, kTrap,
                                Target::Mu)
          == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("bimodal posterior mean is self-consistent at 10x resolution") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    const PriorSpec mix = PriorSpec::gaussian_mixture({0.5, 0.5}, {-2.0, 2.0}, {0.25, 0.25});
    const double coarse = posterior_mean_oracle(spec, mix, 1.0, kTrap, Target::Mu);
    const double fine =
        posterior_mean_oracle(spec, mix, 1.0, QuadratureConfig::trapezoid(40960), Target::Mu);
    CHECK(std::abs(coarse - fine) <= 1e-8);
}

TEST_CASE("schemes agree on smooth integrands") {
    const EdmSpec gauss = EdmSpec::gaussian_location(1.0);
    const PriorSpec gprior = PriorSpec::gaussian(0.3, 1.4);
    for (double y : {-2.0, 0.0, 1.5, 4.0}) {
        const double a = marginal_density(gauss, gprior, y, kGh);
        const double b = marginal_density(gauss, gprior, y, kTrap);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
        const double ma = posterior_mean_oracle(gauss, gprior, y, kGh, Target::Mu);
        const double mb = posterior_mean_oracle(gauss, gprior, y, kTrap, Target::Mu);
        CHECK(std::abs(ma - mb) <= 1e-6 * (1.0 + std::abs(mb)));
    }

    const EdmSpec poisson = EdmSpec::poisson();
    const PriorSpec pconj = PriorSpec::conjugate_nef(2.0, 1.0, poisson);
    for (double y : {0.0, 2.0, 5.0}) {
        const double a = marginal_density(poisson, pconj, y, kGh);
        const double b = marginal_density(poisson, pconj, y, kTrap);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    }

    const EdmSpec gamma = EdmSpec::gamma(0.5);
    const PriorSpec gconj = PriorSpec::conjugate_nef(6.0, 2.0, gamma);
    for (double y : {0.8, 2.0, 5.0}) {
        const double a = posterior_mean_oracle(gamma, gconj, y, kGh, Target::Mu);
        const double b = posterior_mean_oracle(gamma, gconj, y, kTrap, Target::Mu);
        CHECK(std::abs(a - b) <= 1e-6 * (1.0 + std::abs(b)));
    }

    const EdmSpec gv = EdmSpec::gaussian_variance();
    const PriorSpec vconj = PriorSpec::conjugate_nef(4.0, 2.0, gv);
    for (double y : {0.7, 1.5, 2.5}) {
        const double a = marginal_density(gv, vconj, y, kGh);
        const double b = marginal_density(gv, vconj, y, kTrap);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    }
}

TEST_CASE("doubling the node count moves results by less than 1e-8") {
    const EdmSpec gauss = EdmSpec::gaussian_location(1.0);
    const PriorSpec gprior = PriorSpec::gaussian(0.0, 1.0);
    const EdmSpec poisson = EdmSpec::poisson();
    const PriorSpec pconj = PriorSpec::conjugate_nef(2.0, 1.0, poisson);

    const double d1 = marginal_density(gauss, gprior, 1.7, QuadratureConfig::gauss_hermite(128));
    const double d2 = marginal_density(gauss, gprior, 1.7, QuadratureConfig::gauss_hermite(256));
    CHECK(std::abs(d1 - d2) <= 1e-8 * std::max(1.0, std::abs(d2)));

    const double t1 = posterior_mean_oracle(poisson, pconj, 4.0, QuadratureConfig::trapezoid(4096),
                                            Target::Mu);
    const double t2 = posterior_mean_oracle(poisson, pconj, 4.0, QuadratureConfig::trapezoid(8192),
                                            Target::Mu);
    CHECK(std::abs(t1 - t2) <= 1e-8 * std::max(1.0, std::abs(t2)));
}

TEST_CASE("conjugate posterior mean stays in the convex hull of prior mean and obs") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    struct Case {
        EdmSpec spec;
        bool integer_obs;
    };
    const std::vector<Case> cases = {{EdmSpec::poisson(), true},
                                     {EdmSpec::gamma(0.5), false},
                                     {EdmSpec::gaussian_variance(), false}};
    for (const auto& c : cases) {
        for (int rep = 0; rep < 25; ++rep) {
            const double tau = 0.8 + 6.0 * unif(rng);
            const double n = 0.5 + 3.0 * unif(rng);
            double y = c.integer_obs ? std::floor(unif(rng) * 9.0 + 1.0) : 0.3 + 5.0 * unif(rng);
            const double mu_post =
                posterior_mean_oracle(c.spec, PriorSpec::conjugate_nef(tau, n, c.spec), y, kTrap,
                                      Target::Mu);
            const double prior_mean = tau / n;
            const double obs = c.spec.sufficient_stat(y);
            const double lo = std::min(prior_mean, obs) - 1e-7;
            const double hi = std::max(prior_mean, obs) + 1e-7;
            CHECK(mu_post >= lo);
            CHECK(mu_post <= hi);
        }
    }
}

TEST_CASE("custom prior replicates the gaussian prior path") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    const PriorSpec gaussian = PriorSpec::gaussian(0.4, 0.8);
    const PriorSpec custom = PriorSpec::custom(
        [](double mu) {
            const double r = mu - 0.4;
            return -0.5 * r * r / 0.8;  // unnormalized on purpose
        },
        ParamSpace::Mean, 0.4, std::sqrt(0.8));
    const double a = posterior_mean_oracle(spec, gaussian, 1.2, kTrap, Target::Mu);
    const double b = posterior_mean_oracle(spec, custom, 1.2, kTrap, Target::Mu);
    CHECK(std::abs(a - b) <= 1e-8);
}

TEST_CASE("marginal density underflow raises the documented signal") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    const PriorSpec prior = PriorSpec::gaussian(0.0, 1.0);
    CHECK_THROWS_AS(marginal_density(spec, prior, 60.0, kTrap), std::underflow_error);
}
