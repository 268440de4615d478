#include "sdfilter/conjugate.hpp"

#include <cmath>
#include <sstream>

namespace sdfilter {

void ConjugateState::validate(const EdmSpec& spec) const {
    if (!(n > 0.0)) throw std::invalid_argument("conjugate state needs n > 0");
    if (!spec.mean_in_domain(mean())) {
        throw std::domain_error("conjugate state mean tau/n outside the mean domain");
    }
}

void DiscountConfig::validate() const {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw std::invalid_argument("discount factor delta must lie in (0, 1)");
    }
}

ConjugateState conjugate_update(const EdmSpec& spec, const ConjugateState& state, double x) {
    state.validate(spec);
    if (spec.positive_mean_domain()) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::domain_error("NEF observation outside the support");
        }
    } else if (!std::isfinite(x)) {
        throw std::domain_error("NEF observation must be finite");
    }
    return ConjugateState{state.tau + x, state.n + 1.0};
}

double discount_precision(double n_filtered, double delta) {
    DiscountConfig{delta}.validate();
    if (!(n_filtered > 0.0)) throw std::invalid_argument("n_filtered must be positive");
    return delta * n_filtered;
}

double filter_step_score_form(const EdmSpec& spec, double mu_pred, double y, double delta) {
    DiscountConfig{delta}.validate();
    const double mu = mu_pred + (1.0 - delta) * scaled_score(spec, y, mu_pred, 1.0);
    if (!spec.mean_in_domain(mu)) {
        throw std::domain_error("score-form update left the mean domain");
    }
    return mu;
}

ConjugateState steady_init(const EdmSpec& spec, double delta, double mu0) {
    DiscountConfig cfg{delta};
    cfg.validate();
    spec.require_mean(mu0);
    const double n = cfg.steady_prior_strength();
    return ConjugateState{n * mu0, n};
}

ConjugateTrace run_conjugate_filter(const EdmSpec& spec, const std::vector<double>& y_series,
                                    double delta, const ConjugateState& init) {
    DiscountConfig cfg{delta};
    cfg.validate();
    init.validate(spec);
    if (y_series.empty()) throw std::invalid_argument("empty observation series");

    // The score form with coefficient (1 - delta) matches the (tau, n) form
    // only at the steady prior strength, which the default init provides.
    const double n_star = cfg.steady_prior_strength();
    const bool at_fixed_point = std::abs(init.n - n_star) <= 1e-9 * n_star;

    ConjugateTrace trace;
    trace.steps.reserve(y_series.size());
    ConjugateState pred = init;  // predictive state entering step t
    for (std::size_t t = 0; t < y_series.size(); ++t) {
        const double y = y_series[t];
        if (!spec.observation_in_support(y)) {
            std::ostringstream msg;
            msg << "observation outside the support at step " << (t + 1);
            throw std::domain_error(msg.str());
        }
        ConjugateStepRecord rec;
        rec.t = t + 1;
        rec.y = y;
        rec.obs = spec.sufficient_stat(y);
        rec.n_pred = pred.n;
        rec.mu_pred = pred.mean();
        rec.score = score_mean(spec, y, rec.mu_pred);
        rec.innovation = rec.obs - rec.mu_pred;
        rec.loglik = log_density(spec, y, rec.mu_pred);

        const ConjugateState filt = conjugate_update(spec, pred, rec.obs);
        rec.mu_filt = filt.mean();
        rec.mu_score = filter_step_score_form(spec, rec.mu_pred, y, delta);
        rec.tau = filt.tau;
        rec.n = filt.n;
        if (at_fixed_point && std::abs(rec.mu_filt - rec.mu_score) > 1e-9 * (1.0 + std::abs(rec.mu_filt))) {
            std::ostringstream msg;
            msg << "conjugate and score-form means diverged at step " << (t + 1);
            throw std::logic_error(msg.str());
        }
        trace.total_loglik += rec.loglik;
        trace.steps.push_back(rec);

        // Precision discounting scales both hyperparameters, so the
        // predictive mean carries over unchanged.
        pred = ConjugateState{delta * filt.tau, delta * filt.n};
    }
    return trace;
}

}  // namespace sdfilter
