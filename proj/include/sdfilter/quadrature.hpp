#pragma once

#include <functional>
#include <vector>

#include "sdfilter/edm.hpp"

namespace sdfilter {

enum class Scheme { GaussHermite, AdaptiveTrapezoid };
enum class ParamSpace { Mean, Natural };
enum class Target { Theta, Mu };

/// Numerical-integration settings. The trapezoid scheme is a composite rule
/// over a window of +/- domain_halfwidth_sigmas standard deviations around
/// the relevant kernel mode; Gauss-Hermite uses mode/curvature-matched nodes
/// with explicit weight-function correction. Both are spectrally accurate on
/// the smooth, rapidly decaying integrands used here.
struct QuadratureConfig {
    Scheme scheme = Scheme::AdaptiveTrapezoid;
    int node_count = 4096;
    double domain_halfwidth_sigmas = 12.0;
    double fd_step = 1e-5;

    void validate() const;

    static QuadratureConfig gauss_hermite(int nodes = 128);
    static QuadratureConfig trapezoid(int nodes = 4096);
};

/// Prior over the latent parameter. Gaussian / GaussianMixture / Custom-mean
/// priors live on the expectation parameter mu; ConjugateNef (and
/// Custom-natural) priors live on the natural parameter theta.
class PriorSpec {
  public:
    enum class Kind { Gaussian, GaussianMixture, ConjugateNef, Custom };

    static PriorSpec gaussian(double mean, double variance);
    static PriorSpec gaussian_mixture(std::vector<double> weights, std::vector<double> means,
                                      std::vector<double> variances);
    /// pi(theta) proportional to exp(tau * theta - n * psi(theta)) for the
    /// given family; prior mean of mu is tau / n.
    static PriorSpec conjugate_nef(double tau, double n, const EdmSpec& family);
    /// Unnormalized log density over the declared parameter space, with a
    /// center and scale used to place the integration window.
    static PriorSpec custom(std::function<double(double)> log_density, ParamSpace space,
                            double center, double scale);

    Kind kind() const { return kind_; }
    ParamSpace space() const { return space_; }

    double mean() const { return mean_; }
    double variance() const { return variance_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& means() const { return means_; }
    const std::vector<double>& variances() const { return variances_; }
    double tau() const { return tau_; }
    double n() const { return n_; }
    const EdmSpec& conjugate_family() const;
    double custom_center() const { return mean_; }
    double custom_scale() const { return variance_; }
    double custom_log_density(double x) const { return log_density_(x); }

    /// Scheme defaults from the design: Gauss-Hermite 128 for Gaussian-type
    /// priors, trapezoid 4096 otherwise.
    QuadratureConfig default_config() const;

  private:
    PriorSpec() = default;

    Kind kind_ = Kind::Gaussian;
    ParamSpace space_ = ParamSpace::Mean;
    double mean_ = 0.0;
    double variance_ = 1.0;
    std::vector<double> weights_, means_, variances_;
    double tau_ = 0.0;
    double n_ = 1.0;
    std::vector<EdmSpec> family_;  // empty unless ConjugateNef
    std::function<double(double)> log_density_;
};

/// Marginal density of the NEF observation, integral of p(x | param) times
/// the prior. For GaussianVariance the observation argument y is raw and the
/// returned value is the marginal density of x = y^2.
double marginal_density(const EdmSpec& spec, const PriorSpec& prior, double y,
                        const QuadratureConfig& cfg);

/// Central finite difference of log marginal_density in the NEF observation.
/// Unsupported for discrete families (Poisson).
double marginal_score(const EdmSpec& spec, const PriorSpec& prior, double y,
                      const QuadratureConfig& cfg);

/// Posterior mean of theta or mu given the observation, by quadrature.
double posterior_mean_oracle(const EdmSpec& spec, const PriorSpec& prior, double y,
                             const QuadratureConfig& cfg, Target target);

/// Posterior expectation of an arbitrary function of the mean parameter.
/// Mean-space priors only.
double posterior_expectation_of_mean_function(const EdmSpec& spec, const PriorSpec& prior,
                                              double y, const QuadratureConfig& cfg,
                                              const std::function<double(double)>& g);

namespace quad_detail {

/// Nodes and weights such that integral of F over the window is
/// approximately sum_i weight[i] * F(node[i]).
struct Grid {
    std::vector<double> node;
    std::vector<double> weight;
};

/// Gauss-Hermite nodes with weight-corrected lambdas: integral of F over R
/// is approximately sum_i lambda[i] * F(x[i]) for smooth F that decays
/// within the node span. lambda[i] = w[i] * exp(x[i]^2) computed stably via
/// the Christoffel function, not via eigenvector components. Cached per node
/// count; safe for concurrent readers.
struct GhTable {
    std::vector<double> x;
    std::vector<double> lambda;
};
const GhTable& gauss_hermite_table(int n);

Grid build_grid(const QuadratureConfig& cfg, double center, double sd, double lo, double hi);

/// log of sum_i weight[i] * exp(log_f(node[i])); -inf when all mass vanishes.
double log_weighted_sum(const Grid& grid, const std::function<double(double)>& log_f);

/// sum(w g exp(log_f)) / sum(w exp(log_f)) with shared normalization.
double weighted_mean(const Grid& grid, const std::function<double(double)>& log_f,
                     const std::function<double(double)>& g);

/// Log joint density of (observation, mu): log p(x | mu) + log prior(mu),
/// for a Gaussian prior evaluated explicitly (used by fixed-grid finite
/// differences in the predictive mean).
double log_marginal_gaussian_prior(const EdmSpec& spec, double prior_mean, double prior_var,
                                   double obs, const Grid& grid);

/// log p(x | mu) with x the NEF observation (x = y^2 handled by caller).
double loglik_obs(const EdmSpec& spec, double obs, double mu);

/// Interior lower bound used when clipping integration windows to an open
/// positive mean domain.
inline constexpr double kPositiveDomainFloor = 1e-8;

}  // namespace quad_detail

}  // namespace sdfilter
