#include "sdfilter/recursions.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace sdfilter {

namespace {

constexpr double kPositivityFloor = 1e-10;

bool needs_positivity_guard(const EdmSpec& spec, Link link) {
    return link == Link::Identity && spec.positive_mean_domain();
}

double mu_from_link(const EdmSpec& spec, double theta, Link link) {
    const double mu = link == Link::Log ? std::exp(theta) : theta;
    if (!spec.mean_in_domain(mu)) {
        throw std::domain_error("recursion parameter does not map to a valid mean");
    }
    return mu;
}

struct StepOutcome {
    double theta_next;
    bool floored;
};

StepOutcome step_impl(const EdmSpec& spec, const RecursionParams& params, double theta_t,
                      double y_t) {
    const double mu = mu_from_link(spec, theta_t, params.link);
    const double s = score_link(spec, y_t, mu, params.link);
    const double info = fisher_link(spec, mu, params.link);
    double scaled;
    if (params.d == 0.0) {
        scaled = s;
    } else if (params.d == 1.0) {
        scaled = s / info;
    } else {
        scaled = std::pow(info, -params.d) * s;
    }
    double next = params.omega + params.beta * theta_t + params.alpha * scaled;
    bool floored = false;
    if (needs_positivity_guard(spec, params.link) && !(next > kPositivityFloor)) {
        next = kPositivityFloor;
        floored = true;
    }
    return {next, floored};
}

}  // namespace

void RecursionParams::validate(const EdmSpec& spec) const {
    if (!std::isfinite(omega) || !std::isfinite(beta) || !std::isfinite(alpha)
        || !std::isfinite(d)) {
        throw std::invalid_argument("recursion coefficients must be finite");
    }
    if (needs_positivity_guard(spec, link)) {
        // omega = 0 is admitted for the martingale reduction; the positivity
        // floor covers the boundary.
        if (omega < 0.0 || alpha < 0.0 || beta < alpha) {
            throw std::invalid_argument(
                "identity-link positive-domain recursions need omega >= 0, alpha >= 0, beta >= alpha");
        }
    }
}

bool RecursionParams::stationarity_diagnostic() const {
    const GarchCoeffs g = garch_map(omega, beta, alpha);
    return std::abs(g.beta_g + g.alpha_g) < 1.0;
}

double recursion_step(const EdmSpec& spec, const RecursionParams& params, double theta_t,
                      double y_t) {
    params.validate(spec);
    return step_impl(spec, params, theta_t, y_t).theta_next;
}

RecursionTrace run_recursion(const EdmSpec& spec, const RecursionParams& params,
                             const std::vector<double>& y_series) {
    params.validate(spec);
    if (y_series.empty()) throw std::invalid_argument("empty observation series");

    double theta;
    if (params.theta1.has_value()) {
        theta = *params.theta1;
    } else if (std::abs(params.beta) < 1.0) {
        theta = params.omega / (1.0 - params.beta);
    } else {
        // First-observation-implied start on the link scale.
        double mu1 = spec.sufficient_stat(y_series.front());
        if (spec.positive_mean_domain() && !(mu1 > kPositivityFloor)) mu1 = kPositivityFloor;
        theta = params.link == Link::Log ? std::log(mu1) : mu1;
    }

    RecursionTrace trace;
    trace.steps.reserve(y_series.size());
    for (std::size_t t = 0; t < y_series.size(); ++t) {
        const double y = y_series[t];
        if (!spec.observation_in_support(y)) {
            std::ostringstream msg;
            msg << "observation outside the support at step " << (t + 1);
            throw std::domain_error(msg.str());
        }
        RecursionStepRecord rec;
        rec.t = t + 1;
        rec.y = y;
        rec.theta = theta;
        rec.mu = mu_from_link(spec, theta, params.link);
        rec.score = score_link(spec, y, rec.mu, params.link);
        const double info = fisher_link(spec, rec.mu, params.link);
        rec.scaling = params.d == 0.0 ? 1.0 : std::pow(info, -params.d);
        rec.innovation = rec.score / info;
        rec.score_var = std::pow(info, 1.0 - 2.0 * params.d);
        rec.loglik = log_density(spec, y, rec.mu);
        if (!std::isfinite(rec.loglik)) {
            std::ostringstream msg;
            msg << "non-finite log density at step " << (t + 1);
            throw std::runtime_error(msg.str());
        }
        const StepOutcome next = step_impl(spec, params, theta, y);
        rec.theta_next = next.theta_next;
        rec.floored = next.floored;
        if (next.floored) ++trace.floored_steps;
        trace.total_loglik += rec.loglik;
        trace.steps.push_back(rec);
        theta = next.theta_next;
    }
    return trace;
}

GarchCoeffs garch_map(double omega, double beta, double alpha) {
    return GarchCoeffs{omega, alpha, beta - alpha};
}

RecursionParams garch_map_inverse(const GarchCoeffs& g) {
    RecursionParams p;
    p.omega = g.omega_g;
    p.alpha = g.alpha_g;
    p.beta = g.beta_g + g.alpha_g;
    p.d = 1.0;
    p.link = Link::Identity;
    return p;
}

bool garch_nonnegativity_ok(double omega, double beta, double alpha) {
    return omega > 0.0 && alpha >= 0.0 && beta >= alpha;
}

FitBounds FitBounds::defaults_for(const EdmSpec& spec, Link link) {
    FitBounds b;
    if (!needs_positivity_guard(spec, link)) {
        b.omega_lo = -1e3;
        b.beta_lo = -0.999999;
        b.alpha_lo = 0.0;
    }
    return b;
}

void FitBounds::validate() const {
    if (!(omega_lo < omega_hi) || !(beta_lo < beta_hi) || !(alpha_lo < alpha_hi)) {
        throw std::invalid_argument("fit bounds must be nonempty intervals");
    }
}

namespace {

struct FitObjectiveData {
    const EdmSpec* spec;
    const std::vector<double>* series;
    Link link;
    double d;
    const FitBounds* bounds;
    bool guard;  // invariant region beta >= alpha applies
};

bool in_bounds(const FitObjectiveData& ctx, double omega, double beta, double alpha) {
    const FitBounds& b = *ctx.bounds;
    if (omega < b.omega_lo || omega > b.omega_hi) return false;
    if (beta < b.beta_lo || beta > b.beta_hi) return false;
    if (alpha < b.alpha_lo || alpha > b.alpha_hi) return false;
    if (ctx.guard && beta < alpha) return false;
    return true;
}

double negative_loglik(const gsl_vector* v, void* raw) {
    const auto& ctx = *static_cast<const FitObjectiveData*>(raw);
    const double omega = gsl_vector_get(v, 0);
    const double beta = gsl_vector_get(v, 1);
    const double alpha = gsl_vector_get(v, 2);
    if (!in_bounds(ctx, omega, beta, alpha)) {
        // Push the simplex back toward the box with a sloped penalty.
        const FitBounds& b = *ctx.bounds;
        double dist = 0.0;
        dist += std::max({b.omega_lo - omega, omega - b.omega_hi, 0.0});
        dist += std::max({b.beta_lo - beta, beta - b.beta_hi, 0.0});
        dist += std::max({b.alpha_lo - alpha, alpha - b.alpha_hi, 0.0});
        if (ctx.guard) dist += std::max(alpha - beta, 0.0);
        return 1e12 * (1.0 + dist);
    }
    RecursionParams p;
    p.omega = omega;
    p.beta = beta;
    p.alpha = alpha;
    p.d = ctx.d;
    p.link = ctx.link;
    try {
        return -run_recursion(*ctx.spec, p, *ctx.series).total_loglik;
    } catch (const std::exception&) {
        return 1e12;
    }
}

struct SimplexRun {
    double omega, beta, alpha;
    double loglik;
    bool converged;
};

SimplexRun run_simplex(FitObjectiveData& ctx, double omega0, double beta0, double alpha0) {
    gsl_multimin_function f;
    f.n = 3;
    f.f = &negative_loglik;
    f.params = &ctx;

    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, omega0);
    gsl_vector_set(x, 1, beta0);
    gsl_vector_set(x, 2, alpha0);
    gsl_vector* step = gsl_vector_alloc(3);
    gsl_vector_set(step, 0, std::max(0.1 * std::abs(omega0), 1e-3));
    gsl_vector_set(step, 1, 0.05);
    gsl_vector_set(step, 2, 0.05);

    gsl_multimin_fminimizer* mini =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    gsl_multimin_fminimizer_set(mini, &f, x, step);

    int status = GSL_CONTINUE;
    for (int iter = 0; iter < 2000 && status == GSL_CONTINUE; ++iter) {
        if (gsl_multimin_fminimizer_iterate(mini) != 0) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(mini), 1e-9);
    }

    SimplexRun out;
    out.omega = gsl_vector_get(mini->x, 0);
    out.beta = gsl_vector_get(mini->x, 1);
    out.alpha = gsl_vector_get(mini->x, 2);
    out.loglik = -mini->fval;
    out.converged = (status == GSL_SUCCESS);
    gsl_multimin_fminimizer_free(mini);
    gsl_vector_free(x);
    gsl_vector_free(step);
    return out;
}

double clamp_interior(double v, double lo, double hi) {
    const double margin = 1e-6 * (hi - lo);
    return std::min(std::max(v, lo + margin), hi - margin);
}

}  // namespace

FitResult fit_params(const EdmSpec& spec, const std::vector<double>& y_series, Link link,
                     double d, const RecursionParams& init, const FitBounds& bounds) {
    if (y_series.size() < 20) {
        throw std::invalid_argument("fitting needs a series of length >= 20");
    }
    bounds.validate();
    gsl_set_error_handler_off();

    FitObjectiveData ctx;
    ctx.spec = &spec;
    ctx.series = &y_series;
    ctx.link = link;
    ctx.d = d;
    ctx.bounds = &bounds;
    ctx.guard = needs_positivity_guard(spec, link);

    // Start from the supplied init (nudged strictly inside the box), then
    // three seeded random restarts.
    double omega0 = clamp_interior(init.omega, bounds.omega_lo, bounds.omega_hi);
    double beta0 = clamp_interior(init.beta, bounds.beta_lo, bounds.beta_hi);
    double alpha0 = clamp_interior(init.alpha, bounds.alpha_lo, bounds.alpha_hi);
    if (ctx.guard && beta0 < alpha0) beta0 = std::min(alpha0 + 1e-3, bounds.beta_hi);

    std::mt19937_64 rng(20250809ull);  // fixed fitting seed
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SimplexRun best = run_simplex(ctx, omega0, beta0, alpha0);
    for (int restart = 0; restart < 3; ++restart) {
        const double w = bounds.omega_lo + unif(rng) * (bounds.omega_hi - bounds.omega_lo);
        double a = bounds.alpha_lo + unif(rng) * (bounds.alpha_hi - bounds.alpha_lo);
        double b = bounds.beta_lo + unif(rng) * (bounds.beta_hi - bounds.beta_lo);
        if (ctx.guard) {
            a = std::min(a, 0.5 * (bounds.alpha_hi + bounds.alpha_lo));
            b = std::max(b, a);
        }
        const SimplexRun run = run_simplex(ctx, clamp_interior(w, bounds.omega_lo, bounds.omega_hi),
                                           clamp_interior(b, bounds.beta_lo, bounds.beta_hi),
                                           clamp_interior(a, bounds.alpha_lo, bounds.alpha_hi));
        if (run.loglik > best.loglik) best = run;
    }

    FitResult result;
    result.params.omega = best.omega;
    result.params.beta = best.beta;
    result.params.alpha = best.alpha;
    result.params.d = d;
    result.params.link = link;
    result.params.theta1 = init.theta1;
    result.loglik = best.loglik;
    result.converged = best.converged && best.loglik > -1e11;
    return result;
}

}  // namespace sdfilter
