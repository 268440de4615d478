#pragma once

#include <vector>

#include "sdfilter/edm.hpp"
#include "sdfilter/quadrature.hpp"

namespace sdfilter {

/// Gaussian predictive law N(a, P) for the latent mean parameter.
struct PredictiveState {
    double a = 0.0;
    double P = 1.0;

    void validate() const;
};

/// Exact posterior-mean correction under the Gaussian predictive law,
/// computed two ways: as E(mu | y) - a from the quadrature oracle, and as
/// P * d/da log f(y; a) from a fixed-grid central difference. The two routes
/// must agree; exact_correction checks them against each other.
struct CorrectionPair {
    double mean_shift = 0.0;
    double score_form = 0.0;
};

/// Mass of the Gaussian prior below the truncation point used for
/// positive-domain families; exact_correction rejects the call when it is
/// not below 1e-10.
double truncation_mass(const EdmSpec& spec, const PredictiveState& pred,
                       double halfwidth_sigmas);

CorrectionPair exact_correction(const EdmSpec& spec, const PredictiveState& pred, double y,
                                const QuadratureConfig& cfg);

/// Leading-order correction P * score(y; a), the score taken with respect to
/// the mean parameterization.
double leading_correction(const EdmSpec& spec, const PredictiveState& pred, double y);

enum class StudyPointStatus { Ok, UnderflowDropped, TruncationRejected };

struct ExpansionStudy {
    std::vector<double> P_grid;              // strictly decreasing
    std::vector<double> errors;              // |exact - leading| per point
    std::vector<StudyPointStatus> status;    // per-point disposition
    double fitted_slope = 0.0;               // OLS slope of log error vs log P
    double intercept = 0.0;
    int used_points = 0;
};

/// Measures the expansion order of the leading correction: the remainder
/// should shrink like P^2, so the fitted log-log slope sits near 2.
ExpansionStudy expansion_order_study(const EdmSpec& spec, double a, double y,
                                     const std::vector<double>& P_grid,
                                     const QuadratureConfig& cfg);

/// Predictive variance implied by local precision discounting:
/// P = ((1 - delta) / delta) / I(a).
double info_matched_covariance(const EdmSpec& spec, double a, double delta);

/// Filtered variance from precision addition, 1 / (1/P_pred + I(a)).
double filtered_variance(double P_pred, double fisher_at_a);

/// kappa_P = (1 - delta)/delta and the posterior learning rate 1 - delta,
/// which reconcile through 1 - delta = kappa_P / (1 + kappa_P).
struct ScaleReconciliation {
    double kappa_p = 0.0;
    double learning_rate = 0.0;
};

ScaleReconciliation scale_reconciliation(double delta);

}  // namespace sdfilter
