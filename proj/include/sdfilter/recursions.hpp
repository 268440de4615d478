#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sdfilter/edm.hpp"

namespace sdfilter {

/// Coefficients of the observation-driven recursion
///   theta_{t+1} = omega + beta * theta_t + alpha * S_t * s_t,
/// with score s_t and scaling S_t = I^(-d) taken in the link
/// parameterization. d = 1 is the Bayesian benchmark; alpha can be read as a
/// learning rate (1 - delta) or a predictive-variance scale kappa_P.
struct RecursionParams {
    double omega = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
    double d = 1.0;
    Link link = Link::Identity;
    std::optional<double> theta1;  // defaulted by run_recursion when absent

    void validate(const EdmSpec& spec) const;
    /// Diagnostic only: |beta_G + alpha_G| < 1 in GARCH coordinates.
    bool stationarity_diagnostic() const;
};

/// One recursion transition. Identity-link positive-domain recursions floor
/// the next parameter at 1e-10 when it would leave the mean domain.
double recursion_step(const EdmSpec& spec, const RecursionParams& params, double theta_t,
                      double y_t);

struct RecursionStepRecord {
    std::size_t t = 0;        // 1-based step index
    double y = 0.0;           // raw observation
    double theta = 0.0;       // predictive parameter on the link scale
    double mu = 0.0;          // mean-scale parameter
    double score = 0.0;       // score in the recursion parameterization
    double scaling = 0.0;     // S_t = I^(-d) in the recursion parameterization
    double innovation = 0.0;  // I^(-1) s_t in the recursion parameterization
    double score_var = 0.0;   // conditional variance of S_t s_t, I^(1-2d)
    double loglik = 0.0;      // log p(y_t | theta_t)
    double theta_next = 0.0;
    bool floored = false;     // positivity guard applied
};

struct RecursionTrace {
    std::vector<RecursionStepRecord> steps;
    double total_loglik = 0.0;
    std::size_t floored_steps = 0;
};

RecursionTrace run_recursion(const EdmSpec& spec, const RecursionParams& params,
                             const std::vector<double>& y_series);

/// GARCH(1,1) coefficients h_{t+1} = omega_G + alpha_G y^2 + beta_G h.
struct GarchCoeffs {
    double omega_g = 0.0;
    double alpha_g = 0.0;
    double beta_g = 0.0;
};

/// Score coefficients (omega, beta, alpha) -> GARCH (omega, alpha, beta - alpha).
GarchCoeffs garch_map(double omega, double beta, double alpha);
/// Inverse map, GARCH -> score coefficients (omega, beta, alpha).
RecursionParams garch_map_inverse(const GarchCoeffs& g);
/// Nonnegativity region omega > 0, alpha >= 0, beta >= alpha. Outside it the
/// map still applies; callers decide whether to warn.
bool garch_nonnegativity_ok(double omega, double beta, double alpha);

struct FitBounds {
    double omega_lo = 1e-8, omega_hi = 1e3;
    double beta_lo = 0.0, beta_hi = 0.999999;
    double alpha_lo = 0.0, alpha_hi = 1.0;

    static FitBounds defaults_for(const EdmSpec& spec, Link link);
    void validate() const;
};

struct FitResult {
    RecursionParams params;
    double loglik = -1e300;
    bool converged = false;
};

/// Derivative-free maximization of the prediction-error log likelihood
/// (Nelder-Mead, the given start plus three seeded random restarts). Bounds
/// and the family's invariant region are enforced through the objective.
FitResult fit_params(const EdmSpec& spec, const std::vector<double>& y_series, Link link,
                     double d, const RecursionParams& init, const FitBounds& bounds);

}  // namespace sdfilter
