#include "sdfilter/verify.hpp"

#include <cmath>

#include "sdfilter/local_approx.hpp"

namespace sdfilter {

namespace {

constexpr double kClosureTol = 1e-6;

QuadratureConfig config_for(const PriorSpec& prior, const std::optional<QuadratureConfig>& cfg) {
    return cfg.has_value() ? *cfg : prior.default_config();
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

/// Keeps the (lhs, rhs) pair with the largest gap across a grid.
struct WorstPoint {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = -1.0;

    void update(double l, double r) {
        const double g = std::abs(l - r);
        if (g > gap) {
            lhs = l;
            rhs = r;
            gap = g;
        }
    }

    IdentityReport report(IdentityId id, double tol) const {
        return IdentityReport::make(id, lhs, rhs, tol);
    }
};

IdentityReport lemma1_scenario(const PriorSpec& prior, double sigma2, double marginal_sd,
                               double grid_center, const std::optional<QuadratureConfig>& cfg) {
    const EdmSpec spec = EdmSpec::gaussian_location(sigma2);
    const QuadratureConfig qc = config_for(prior, cfg);
    WorstPoint worst;
    for (double y : linspace(grid_center - 4.0 * marginal_sd, grid_center + 4.0 * marginal_sd, 21)) {
        const double score = marginal_score(spec, prior, y, qc);
        worst.update(tweedie_gaussian(y, sigma2, score),
                     posterior_mean_oracle(spec, prior, y, qc, Target::Mu));
    }
    return worst.report(IdentityId::GaussianTweedie, kClosureTol);
}

IdentityReport lemma2_scenario(const EdmSpec& spec, const PriorSpec& prior,
                               const std::vector<double>& y_grid,
                               const std::optional<QuadratureConfig>& cfg) {
    const QuadratureConfig qc = config_for(prior, cfg);
    WorstPoint worst;
    for (double y : y_grid) {
        const double score = marginal_score(spec, prior, y, qc);
        worst.update(tweedie_nef_natural(spec, spec.sufficient_stat(y), score),
                     posterior_mean_oracle(spec, prior, y, qc, Target::Theta));
    }
    return worst.report(IdentityId::NefNatural, kClosureTol);
}

void lemma3_scenarios(const EdmSpec& spec, double tau, double n,
                      const std::vector<double>& y_grid,
                      const std::optional<QuadratureConfig>& cfg,
                      std::vector<IdentityReport>& out) {
    const PriorSpec prior = PriorSpec::conjugate_nef(tau, n, spec);
    const QuadratureConfig qc = config_for(prior, cfg);
    WorstPoint closed_vs_oracle;
    WorstPoint closed_vs_general;
    for (double y : y_grid) {
        const double closed = nef_expectation_posterior(spec, prior, y, qc);
        closed_vs_oracle.update(closed, posterior_mean_oracle(spec, prior, y, qc, Target::Mu));
        closed_vs_general.update(closed, nef_expectation_posterior_quadrature(spec, prior, y, qc));
    }
    out.push_back(closed_vs_oracle.report(IdentityId::NefExpectation, kClosureTol));
    out.push_back(closed_vs_general.report(IdentityId::NefExpectation, kClosureTol));
}

IdentityReport prop2_scenario(const EdmSpec& spec, double a, double P,
                              const std::vector<double>& y_grid,
                              const std::optional<QuadratureConfig>& cfg) {
    const QuadratureConfig qc =
        cfg.has_value() ? *cfg : PriorSpec::gaussian(a, P).default_config();
    WorstPoint worst;
    for (double y : y_grid) {
        const CorrectionPair pair = exact_correction(spec, PredictiveState{a, P}, y, qc);
        worst.update(pair.mean_shift, pair.score_form);
    }
    return worst.report(IdentityId::ParameterSpaceTweedie, kClosureTol);
}

}  // namespace

VerifySuite verify_suite_from_name(const std::string& name) {
    if (name == "lemma1") return VerifySuite::Lemma1;
    if (name == "lemma2") return VerifySuite::Lemma2;
    if (name == "lemma3") return VerifySuite::Lemma3;
    if (name == "prop2") return VerifySuite::Prop2;
    if (name == "all") return VerifySuite::All;
    throw std::invalid_argument("unknown suite: " + name);
}

std::vector<IdentityReport> run_identity_suite(VerifySuite suite,
                                               const std::optional<QuadratureConfig>& cfg) {
    std::vector<IdentityReport> reports;
    const bool all = suite == VerifySuite::All;

    if (all || suite == VerifySuite::Lemma1) {
        reports.push_back(lemma1_scenario(PriorSpec::gaussian(0.0, 1.0), 1.0, std::sqrt(2.0), 0.0, cfg));
        reports.push_back(lemma1_scenario(
            PriorSpec::gaussian_mixture({0.5, 0.5}, {-2.0, 2.0}, {0.25, 0.25}), 1.0,
            std::sqrt(5.25), 0.0, cfg));
    }
    if (all || suite == VerifySuite::Lemma2) {
        reports.push_back(lemma2_scenario(EdmSpec::gaussian_location(4.0),
                                          PriorSpec::gaussian(0.0, 1.0),
                                          linspace(-4.0 * std::sqrt(5.0), 4.0 * std::sqrt(5.0), 21),
                                          cfg));
        reports.push_back(lemma2_scenario(
            EdmSpec::gaussian_location(1.0),
            PriorSpec::gaussian_mixture({0.5, 0.5}, {-2.0, 2.0}, {0.25, 0.25}),
            linspace(-4.0 * std::sqrt(5.25), 4.0 * std::sqrt(5.25), 21), cfg));
        const EdmSpec gamma = EdmSpec::gamma(0.5);
        reports.push_back(
            lemma2_scenario(gamma, PriorSpec::conjugate_nef(6.0, 2.0, gamma),
                            linspace(0.5, 9.0, 21), cfg));
    }
    if (all || suite == VerifySuite::Lemma3) {
        lemma3_scenarios(EdmSpec::gaussian_location(1.0), 0.0, 2.0, linspace(-4.0, 4.0, 21), cfg,
                         reports);
        lemma3_scenarios(EdmSpec::poisson(), 2.0, 1.0, linspace(0.0, 10.0, 11), cfg, reports);
        lemma3_scenarios(EdmSpec::gamma(0.5), 6.0, 2.0, linspace(0.5, 9.0, 21), cfg, reports);
        lemma3_scenarios(EdmSpec::gaussian_variance(), 4.0, 2.0, linspace(0.2, 4.0, 21), cfg,
                         reports);
    }
    if (all || suite == VerifySuite::Prop2) {
        reports.push_back(prop2_scenario(EdmSpec::gaussian_location(1.0), 0.0, 0.1,
                                         linspace(-3.0, 3.0, 7), cfg));
        reports.push_back(
            prop2_scenario(EdmSpec::poisson(), 9.0, 0.25, linspace(4.0, 16.0, 7), cfg));
        reports.push_back(
            prop2_scenario(EdmSpec::gamma(0.5), 8.0, 0.25, linspace(4.0, 14.0, 6), cfg));
        reports.push_back(prop2_scenario(EdmSpec::gaussian_variance(), 6.0, 0.2,
                                         {1.0, 1.8, 2.4, 2.9, 3.3}, cfg));
    }
    return reports;
}

}  // namespace sdfilter
