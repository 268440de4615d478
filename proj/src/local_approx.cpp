#include "sdfilter/local_approx.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdfilter {

namespace {

using quad_detail::Grid;
using quad_detail::kPositiveDomainFloor;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

constexpr double kTruncationMassLimit = 1e-10;
constexpr double kErrorUnderflowLimit = 1e-13;

double truncation_point(const PredictiveState& pred, double halfwidth_sigmas) {
    return std::max(kPositiveDomainFloor, pred.a - halfwidth_sigmas * std::sqrt(pred.P));
}

void require_truncation_ok(const EdmSpec& spec, const PredictiveState& pred,
                           double halfwidth_sigmas) {
    const double mass = truncation_mass(spec, pred, halfwidth_sigmas);
    if (mass >= kTruncationMassLimit) {
        std::ostringstream msg;
        msg << "truncated prior mass " << mass << " exceeds " << kTruncationMassLimit
            << "; predictive law is out of the small-variance regime";
        throw std::domain_error(msg.str());
    }
}

}  // namespace

void PredictiveState::validate() const {
    if (!(P > 0.0) || !std::isfinite(P) || !std::isfinite(a)) {
        throw std::invalid_argument("predictive state needs finite a and P > 0");
    }
}

double truncation_mass(const EdmSpec& spec, const PredictiveState& pred,
                       double halfwidth_sigmas) {
    pred.validate();
    if (!spec.positive_mean_domain()) return 0.0;
    const double eps = truncation_point(pred, halfwidth_sigmas);
    return normal_cdf((eps - pred.a) / std::sqrt(pred.P));
}

CorrectionPair exact_correction(const EdmSpec& spec, const PredictiveState& pred, double y,
                                const QuadratureConfig& cfg) {
    cfg.validate();
    pred.validate();
    spec.require_mean(pred.a);
    spec.require_observation(y);
    require_truncation_ok(spec, pred, cfg.domain_halfwidth_sigmas);
    const double obs = spec.sufficient_stat(y);
    const double sd = std::sqrt(pred.P);

    CorrectionPair out;
    const PriorSpec prior = PriorSpec::gaussian(pred.a, pred.P);
    out.mean_shift = posterior_mean_oracle(spec, prior, y, cfg, Target::Mu) - pred.a;

    // Marginal-score form on one fixed grid: the window is placed from the
    // central a so quadrature error cancels in the difference.
    double lo = pred.a - cfg.domain_halfwidth_sigmas * sd;
    const double hi = pred.a + cfg.domain_halfwidth_sigmas * sd;
    if (spec.positive_mean_domain()) lo = std::max(lo, kPositiveDomainFloor);
    const Grid grid = quad_detail::build_grid(cfg, pred.a, sd, lo, hi);
    const double h = std::min(1e-5, sd * 1e-3);
    const double up = quad_detail::log_marginal_gaussian_prior(spec, pred.a + h, pred.P, obs, grid);
    const double dn = quad_detail::log_marginal_gaussian_prior(spec, pred.a - h, pred.P, obs, grid);
    out.score_form = pred.P * (up - dn) / (2.0 * h);

    if (std::abs(out.mean_shift - out.score_form) > 1e-5 * (1.0 + std::abs(out.mean_shift))) {
        throw std::runtime_error("mean-shift and marginal-score corrections diverged");
    }
    return out;
}

double leading_correction(const EdmSpec& spec, const PredictiveState& pred, double y) {
    pred.validate();
    return pred.P * score_mean(spec, y, pred.a);
}

ExpansionStudy expansion_order_study(const EdmSpec& spec, double a, double y,
                                     const std::vector<double>& P_grid,
                                     const QuadratureConfig& cfg) {
    if (P_grid.empty()) throw std::invalid_argument("empty P grid");
    for (size_t i = 0; i < P_grid.size(); ++i) {
        if (!(P_grid[i] >= 1e-5)) {
            throw std::invalid_argument("P grid entries must stay >= 1e-5");
        }
        if (i > 0 && !(P_grid[i] < P_grid[i - 1])) {
            throw std::invalid_argument("P grid must be strictly decreasing");
        }
    }

    ExpansionStudy study;
    study.P_grid = P_grid;
    study.errors.assign(P_grid.size(), std::numeric_limits<double>::quiet_NaN());
    study.status.assign(P_grid.size(), StudyPointStatus::Ok);

    for (size_t i = 0; i < P_grid.size(); ++i) {
        const PredictiveState pred{a, P_grid[i]};
        double err;
        try {
            const CorrectionPair pair = exact_correction(spec, pred, y, cfg);
            err = std::abs(pair.mean_shift - leading_correction(spec, pred, y));
        } catch (const std::domain_error&) {
            study.status[i] = StudyPointStatus::TruncationRejected;
            continue;
        }
        if (err < kErrorUnderflowLimit) {
            study.status[i] = StudyPointStatus::UnderflowDropped;
            continue;
        }
        study.errors[i] = err;
    }

    // OLS of log error on log P over the surviving points.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (size_t i = 0; i < P_grid.size(); ++i) {
        if (study.status[i] != StudyPointStatus::Ok) continue;
        const double lx = std::log(P_grid[i]);
        const double ly = std::log(study.errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    study.used_points = m;
    if (m < 2) {
        study.fitted_slope = std::numeric_limits<double>::quiet_NaN();
        study.intercept = std::numeric_limits<double>::quiet_NaN();
        return study;
    }
    const double denom = m * sxx - sx * sx;
    study.fitted_slope = (m * sxy - sx * sy) / denom;
    study.intercept = (sy - study.fitted_slope * sx) / m;
    return study;
}

double info_matched_covariance(const EdmSpec& spec, double a, double delta) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    return ((1.0 - delta) / delta) / fisher_mean(spec, a);
}

double filtered_variance(double P_pred, double fisher_at_a) {
    if (!(P_pred > 0.0) || !(fisher_at_a > 0.0)) {
        throw std::invalid_argument("both precisions must be positive");
    }
    return 1.0 / (1.0 / P_pred + fisher_at_a);
}

ScaleReconciliation scale_reconciliation(double delta) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    ScaleReconciliation out;
    out.kappa_p = (1.0 - delta) / delta;
    out.learning_rate = 1.0 - delta;
    const double reconciled = out.kappa_p / (1.0 + out.kappa_p);
    if (std::abs(reconciled - out.learning_rate) > 1e-15) {
        throw std::logic_error("learning-scale reconciliation identity failed");
    }
    return out;
}

}  // namespace sdfilter
