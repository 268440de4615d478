#include <doctest.h>

#include <cmath>

#include "sdfilter/local_approx.hpp"
#include "support.hpp"

using namespace sdfilter;
using namespace testsupport;

namespace {

const QuadratureConfig kGh = QuadratureConfig::gauss_hermite(128);

}  // namespace

TEST_CASE("exact correction reproduces the kalman gain") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    const CorrectionPair pair = exact_correction(spec, PredictiveState{0.0, 0.1}, 1.0, kGh);
    CHECK(pair.mean_shift == doctest::Approx(1.0 / 11.0).epsilon(1e-8));
    CHECK(pair.score_form == doctest::Approx(1.0 / 11.0).epsilon(1e-8));

    const CorrectionPair symmetric = exact_correction(spec, PredictiveState{0.7, 0.2}, 0.7, kGh);
    CHECK(std::abs(symmetric.mean_shift) <= 1e-9);
}

TEST_CASE("leading correction is P times the conditional score") {
    CHECK(leading_correction(EdmSpec::gaussian_location(1.0), PredictiveState{0.0, 0.1}, 1.0)
          == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(leading_correction(EdmSpec::poisson(), PredictiveState{2.0, 0.05}, 3.0)
          == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(leading_correction(EdmSpec::gamma(0.5), PredictiveState{1.5, 0.2}, 1.5) == 0.0);
}

TEST_CASE("proposition 2: mean-shift and marginal-score forms agree") {
    struct Case {
        EdmSpec spec;
        std::vector<double> as;
        std::vector<double> y_offsets;  // y = a + offset (pre-squaring scale)
    };
    const std::vector<Case> cases = {
        {EdmSpec::gaussian_location(1.0), {-1.0, 0.5, 2.0}, {-2.0, -0.5, 0.0, 1.0, 2.5}},
        {EdmSpec::poisson(), {6.0, 9.0, 12.0}, {-3.0, -1.0, 0.0, 2.0, 4.0}},
        {EdmSpec::gamma(0.5), {6.0, 9.0}, {-3.0, -1.0, 0.0, 2.0, 4.0}},
    };
    for (const auto& c : cases) {
        for (double a : c.as) {
            for (double P : {0.01, 0.1, 0.5}) {
                for (double off : c.y_offsets) {
                    const double y = a + off;
                    if (!c.spec.observation_in_support(y)) continue;
                    const CorrectionPair pair =
                        exact_correction(c.spec, PredictiveState{a, P}, y, kGh);
                    CHECK(std::abs(pair.mean_shift - pair.score_form) <= 1e-6);
                }
            }
        }
    }
    // GaussianVariance: raw observations around sqrt(a)
    const EdmSpec gv = EdmSpec::gaussian_variance();
    for (double a : {7.0, 10.0}) {
        for (double P : {0.01, 0.1, 0.5}) {
            for (double y : {1.5, 2.3, 2.9, 3.4}) {
                const CorrectionPair pair = exact_correction(gv, PredictiveState{a, P}, y, kGh);
                CHECK(std::abs(pair.mean_shift - pair.score_form) <= 1e-6);
            }
        }
    }
}

TEST_CASE("truncation guard arithmetic and rejection") {
    const EdmSpec poisson = EdmSpec::poisson();
    // a - 12 sqrt(P) > 0: mass is Phi(-12)
    CHECK(truncation_mass(poisson, PredictiveState{9.0, 0.25}, 12.0) <= 1e-30);
    // floor branch: mass is Phi((1e-8 - a)/sqrt(P))
    const double mass = truncation_mass(poisson, PredictiveState{1.0, 0.25}, 12.0);
    CHECK(mass == doctest::Approx(normal_cdf((1e-8 - 1.0) / 0.5)).epsilon(1e-12));
    CHECK(truncation_mass(EdmSpec::gaussian_location(1.0), PredictiveState{0.0, 4.0}, 12.0) == 0.0);

    CHECK_THROWS_AS(exact_correction(poisson, PredictiveState{1.0, 0.5}, 2.0, kGh),
                    std::domain_error);
}

TEST_CASE("expansion order study: gaussian closed form and slope near 2") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    const std::vector<double> grid = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    const ExpansionStudy study = expansion_order_study(spec, 0.0, 1.0, grid, kGh);
    REQUIRE(study.used_points == 5);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double P = grid[i];
        const double closed = P * P * 1.0 / (1.0 * (P + 1.0));
        CHECK(study.status[i] == StudyPointStatus::Ok);
        CHECK(std::abs(study.errors[i] - closed) <= 1e-8);
    }
    CHECK(study.fitted_slope >= 1.8);
    CHECK(study.fitted_slope <= 2.2);

    // slope approaches 2 on the small-P subgrid
    const ExpansionStudy fine = expansion_order_study(spec, 0.0, 1.0, {1e-2, 3e-3, 1e-3}, kGh);
    CHECK(std::abs(fine.fitted_slope - 2.0) <= 0.02);
}

TEST_CASE("expansion order study: poisson and gamma with per-point rejections") {
    const std::vector<double> grid = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

    const ExpansionStudy poisson = expansion_order_study(EdmSpec::poisson(), 2.0, 4.0, grid, kGh);
    CHECK(poisson.status[0] == StudyPointStatus::TruncationRejected);  // mass ~1.3e-10
    CHECK(poisson.used_points >= 3);
    CHECK(poisson.fitted_slope >= 1.8);
    CHECK(poisson.fitted_slope <= 2.2);

    // At y = a + 1 the poisson P^2 coefficient (l''' + 2 s H)/2 vanishes
    // identically, so the remainder is one order higher there.
    const ExpansionStudy degenerate =
        expansion_order_study(EdmSpec::poisson(), 2.0, 3.0, grid, kGh);
    CHECK(degenerate.fitted_slope >= 2.8);
    CHECK(degenerate.fitted_slope <= 3.2);

    const ExpansionStudy gamma = expansion_order_study(EdmSpec::gamma(0.5), 1.0, 2.0, grid, kGh);
    CHECK(gamma.status[0] == StudyPointStatus::TruncationRejected);
    CHECK(gamma.status[1] == StudyPointStatus::TruncationRejected);
    CHECK(gamma.used_points == 3);
    CHECK(gamma.fitted_slope >= 1.8);
    CHECK(gamma.fitted_slope <= 2.2);
}

TEST_CASE("expansion study input validation") {
    const EdmSpec spec = EdmSpec::gaussian_location(1.0);
    CHECK_THROWS_AS(expansion_order_study(spec, 0.0, 1.0, {}, kGh), std::invalid_argument);
    CHECK_THROWS_AS(expansion_order_study(spec, 0.0, 1.0, {1e-3, 1e-2}, kGh),
                    std::invalid_argument);
    CHECK_THROWS_AS(expansion_order_study(spec, 0.0, 1.0, {1e-3, 1e-6}, kGh),
                    std::invalid_argument);
}

TEST_CASE("information-matched covariance and filtered variance") {
    // kappa_P = 0.25 at delta = 0.8; with I = 4, P = 0.0625
    CHECK(info_matched_covariance(EdmSpec::gaussian_location(0.25), 0.0, 0.8)
          == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(info_matched_covariance(EdmSpec::gaussian_location(1.0), 0.0, 0.5)
          == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(info_matched_covariance(EdmSpec::poisson(), 2.0, 0.9)
          == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

    CHECK(filtered_variance(0.25, 4.0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(filtered_variance(1e12, 4.0) == doctest::Approx(0.25).epsilon(1e-10));

    // Remark: with P = kappa_P / I the filtered variance is (1 - delta) / I
    for (double delta : {0.5, 0.75, 0.9}) {
        for (const auto& spec : {EdmSpec::gaussian_location(0.7), EdmSpec::poisson()}) {
            const double a = 2.0;
            const double info = fisher_mean(spec, a);
            const double P = info_matched_covariance(spec, a, delta);
            CHECK(std::abs(P - ((1.0 - delta) / delta) / info) <= 1e-15 * P);
            const double filt = filtered_variance(P, info);
            CHECK(std::abs(filt - (1.0 - delta) / info) <= 1e-15 * filt);
        }
    }
}

TEST_CASE("scale reconciliation") {
    const ScaleReconciliation r9 = scale_reconciliation(0.9);
    CHECK(r9.kappa_p == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(r9.learning_rate == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(std::abs(r9.kappa_p / (1.0 + r9.kappa_p) - 0.1) <= 1e-15);

    const ScaleReconciliation r5 = scale_reconciliation(0.5);
    CHECK(r5.kappa_p == 1.0);
    CHECK(r5.learning_rate == 0.5);

    const ScaleReconciliation r99 = scale_reconciliation(0.99);
    CHECK(r99.kappa_p == doctest::Approx(0.0101010101).epsilon(1e-8));
    CHECK(r99.learning_rate == doctest::Approx(0.01).epsilon(1e-12));

    for (double delta : {0.5, 0.75, 0.9}) {
        const ScaleReconciliation r = scale_reconciliation(delta);
        CHECK(std::abs(r.kappa_p / (1.0 + r.kappa_p) - (1.0 - delta)) <= 1e-15);
    }
    CHECK_THROWS_AS(scale_reconciliation(1.0), std::invalid_argument);
}

TEST_CASE("proposition 4 small-kappa remainder is stable in kappa^2 units") {
    struct Case {
        EdmSpec spec;
        double a, y;
        std::vector<double> kappas;  // decreasing
    };
    const std::vector<Case> cases = {
        {EdmSpec::gaussian_location(1.0), 0.5, 1.5, {1.0, 1.0 / 3.0, 1.0 / 9.0}},
        {EdmSpec::poisson(), 15.0, 18.0, {1.0 / 3.0, 1.0 / 9.0}},
        {EdmSpec::gamma(0.5), 1.0, 1.5, {0.03, 0.01}},
        {EdmSpec::gaussian_variance(), 2.0, 2.0, {0.01, 0.004}},
    };
    for (const auto& c : cases) {
        std::vector<double> ratios;
        for (double kappa : c.kappas) {
            const double delta = 1.0 / (1.0 + kappa);
            const double P = info_matched_covariance(c.spec, c.a, delta);
            const CorrectionPair pair = exact_correction(c.spec, PredictiveState{c.a, P}, c.y, kGh);
            const double leading = kappa * (c.spec.sufficient_stat(c.y) - c.a);
            ratios.push_back(std::abs(pair.mean_shift - leading) / (kappa * kappa));
        }
        const double r1 = ratios[ratios.size() - 2];
        const double r2 = ratios[ratios.size() - 1];
        CAPTURE(r1);
        CAPTURE(r2);
        CHECK(std::abs(r1 / r2 - 1.0) < 0.5);
    }
}
