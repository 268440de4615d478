#pragma once

#include <cstddef>
#include <vector>

#include "sdfilter/edm.hpp"

namespace sdfilter {

/// Conjugate hyperparameters pi(theta) ~ exp(tau * theta - n * psi(theta)).
/// The implied mean of the expectation parameter is tau / n.
struct ConjugateState {
    double tau = 0.0;
    double n = 1.0;

    double mean() const { return tau / n; }
    void validate(const EdmSpec& spec) const;
};

struct DiscountConfig {
    double delta = 0.9;

    /// Fixed point of n -> delta * (n + 1): the steady predictive strength.
    double steady_prior_strength() const { return delta / (1.0 - delta); }
    void validate() const;
};

/// One observation's conjugate update: (tau, n) -> (tau + x, n + 1), with x
/// the NEF observation (the squared value for GaussianVariance).
ConjugateState conjugate_update(const EdmSpec& spec, const ConjugateState& state, double x);

/// Predictive prior strength delta * n_filtered.
double discount_precision(double n_filtered, double delta);

/// Score-form update mu + (1 - delta) * I(mu)^-1 * score(y, mu), exact under
/// the steady prior strength. Takes the raw observation y.
double filter_step_score_form(const EdmSpec& spec, double mu_pred, double y, double delta);

/// Steady-state initial predictive state: n = delta/(1-delta), tau = n * mu0.
ConjugateState steady_init(const EdmSpec& spec, double delta, double mu0);

struct ConjugateStepRecord {
    std::size_t t = 0;       // 1-based step index
    double y = 0.0;          // raw observation
    double obs = 0.0;        // NEF observation entering the update
    double mu_pred = 0.0;    // predictive mean tau_pred / n_pred
    double mu_filt = 0.0;    // filtered mean via the (tau, n) form
    double mu_score = 0.0;   // filtered mean via the score form
    double tau = 0.0;        // filtered tau
    double n = 0.0;          // filtered n
    double n_pred = 0.0;     // predictive strength before the update
    double score = 0.0;      // conditional score at mu_pred
    double innovation = 0.0; // obs - mu_pred
    double loglik = 0.0;     // log p(y | mu_pred)
};

struct ConjugateTrace {
    std::vector<ConjugateStepRecord> steps;
    double total_loglik = 0.0;
};

/// Runs the discounted conjugate filter: per step discount, predict, update.
/// Both the (tau, n) form and the score form are recorded; when the initial
/// strength sits at the steady value the two are checked to agree.
ConjugateTrace run_conjugate_filter(const EdmSpec& spec, const std::vector<double>& y_series,
                                    double delta, const ConjugateState& init);

}  // namespace sdfilter
