#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "sdfilter/edm.hpp"

namespace sdfilter {

/// Deterministic generator with pinned algorithms so traces reproduce
/// bit-exactly across runs: std::mt19937_64 underneath (fully specified by
/// the standard), uniforms from the top 53 bits, Gaussians by Box-Muller,
/// Poisson by counting unit-exponential arrivals (split by halving above
/// mean 64), Gamma by Marsaglia-Tsang (shape boost below 1).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // (0, 1]
    double normal();   // standard normal
    double poisson(double mean);
    double gamma(double shape, double scale);

  private:
    std::mt19937_64 engine_;
    bool have_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

struct Garch11Dgp {
    double omega_g = 0.1;
    double alpha_g = 0.05;
    double beta_g = 0.90;
};

struct NefConstantDgp {
    Family family = Family::Poisson;
    double mu = 1.0;
    double phi = 1.0;  // dispersion where the family has one (Gamma, GaussianLocation)
};

struct NefRandomWalkMeanDgp {
    Family family = Family::Poisson;
    double step_sd = 0.05;
    double phi = 1.0;
};

struct GaussianLocalLevelDgp {
    double state_var = 0.01;
    double obs_var = 1.0;
};

using Dgp = std::variant<Garch11Dgp, NefConstantDgp, NefRandomWalkMeanDgp, GaussianLocalLevelDgp>;

struct SimConfig {
    Dgp dgp;
    std::size_t length = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SimResult {
    std::vector<double> y;
    std::optional<std::vector<double>> latent;
};

SimResult simulate(const SimConfig& cfg);

/// omega_G / (1 - alpha_G - beta_G); also the variance the GARCH simulator
/// starts its burn-in from.
double garch11_unconditional_variance(const Garch11Dgp& dgp);

/// Burn-in steps discarded before recording GARCH output.
inline constexpr std::size_t kGarchBurnIn = 500;

}  // namespace sdfilter
