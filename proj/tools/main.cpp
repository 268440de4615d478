#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sdfilter/io.hpp"
#include "sdfilter/verify.hpp"

namespace {

using nlohmann::json;
using namespace sdfilter;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

/// JSON config-file reader for CLI11: a flat object per subcommand, values
/// override built-in defaults and are overridden by command-line flags.
class ConfigJson : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        return walk(j, "", {});
    }

  private:
    static std::vector<CLI::ConfigItem> walk(const json& j, const std::string& name,
                                             std::vector<std::string> parents) {
        std::vector<CLI::ConfigItem> items;
        if (j.is_object()) {
            if (!name.empty()) parents.push_back(name);
            for (auto it = j.begin(); it != j.end(); ++it) {
                auto sub = walk(it.value(), it.key(), parents);
                items.insert(items.end(), sub.begin(), sub.end());
            }
        } else if (!name.empty()) {
            items.emplace_back();
            items.back().name = name;
            items.back().parents = std::move(parents);
            items.back().inputs = {j.is_string() ? j.get<std::string>() : j.dump()};
        } else {
            throw CLI::ConversionError("config file must be a JSON object");
        }
        return items;
    }
};

struct QuadratureFlags {
    std::string scheme;  // empty = prior-dependent default
    int nodes = 0;       // 0 = scheme default
    double halfwidth = 12.0;
    double fd_step = 1e-5;

    void attach(CLI::App* cmd) {
        cmd->add_option("--quad-scheme", scheme, "gauss-hermite or trapezoid")
            ->check(CLI::IsMember({"gauss-hermite", "trapezoid"}));
        cmd->add_option("--quad-nodes", nodes, "quadrature node count")
            ->envname("SDFILTER_QUAD_NODES");
        cmd->add_option("--quad-halfwidth", halfwidth, "integration window halfwidth in sigmas");
        cmd->add_option("--fd-step", fd_step, "central finite-difference step");
    }

    std::optional<QuadratureConfig> resolve() const {
        if (scheme.empty() && nodes == 0 && halfwidth == 12.0 && fd_step == 1e-5) return {};
        QuadratureConfig cfg = scheme == "gauss-hermite" ? QuadratureConfig::gauss_hermite()
                                                         : QuadratureConfig::trapezoid();
        if (nodes > 0) cfg.node_count = nodes;
        cfg.domain_halfwidth_sigmas = halfwidth;
        cfg.fd_step = fd_step;
        cfg.validate();
        return cfg;
    }

    QuadratureConfig resolve_for(const PriorSpec& prior) const {
        auto cfg = resolve();
        return cfg.has_value() ? *cfg : prior.default_config();
    }
};

EdmSpec spec_from_flags(const std::string& family, double phi) {
    return edm_from_family(family_from_name(family), phi);
}

struct SimulateCmd {
    std::string dgp = "garch11";
    std::size_t length = 100;
    std::uint64_t seed = 1;
    double omega_g = 0.1, alpha_g = 0.05, beta_g = 0.90;
    std::string family = "poisson";
    double mu = 1.0, phi = 1.0, step_sd = 0.05;
    double state_var = 0.01, obs_var = 1.0;
    std::string output;

    int run() const {
        SimConfig cfg;
        cfg.length = length;
        cfg.seed = seed;
        if (dgp == "garch11") {
            cfg.dgp = Garch11Dgp{omega_g, alpha_g, beta_g};
        } else if (dgp == "nef-constant") {
            cfg.dgp = NefConstantDgp{family_from_name(family), mu, phi};
        } else if (dgp == "nef-random-walk") {
            cfg.dgp = NefRandomWalkMeanDgp{family_from_name(family), step_sd, phi};
        } else {
            cfg.dgp = GaussianLocalLevelDgp{state_var, obs_var};
        }
        write_output(output, render_sim_csv(simulate(cfg)));
        return kExitOk;
    }
};

struct FilterCmd {
    std::string mode = "conjugate";
    std::string family = "poisson";
    double phi = 1.0;
    std::string input;
    std::string output;
    double delta = 0.9;
    std::optional<double> mu0;
    double omega = 0.0, beta = 0.0, alpha = 0.0, d = 1.0;
    std::string link = "identity";
    std::optional<double> theta1;

    int run() const {
        const EdmSpec spec = spec_from_flags(family, phi);
        const SeriesData data = read_series_csv(input);
        if (mode == "conjugate") {
            double m0;
            if (mu0.has_value()) {
                m0 = *mu0;
            } else {
                double acc = 0.0;
                for (double y : data.y) acc += spec.sufficient_stat(y);
                m0 = acc / static_cast<double>(data.y.size());
            }
            if (!spec.mean_in_domain(m0)) {
                throw std::invalid_argument(
                    "series mean lies outside the mean domain; pass --mu0 explicitly");
            }
            const ConjugateTrace trace =
                run_conjugate_filter(spec, data.y, delta, steady_init(spec, delta, m0));
            write_output(output, render_conjugate_trace_csv(trace));
            return kExitOk;
        }
        RecursionParams params;
        params.omega = omega;
        params.beta = beta;
        params.alpha = alpha;
        params.d = d;
        params.link = link == "log" ? Link::Log : Link::Identity;
        params.theta1 = theta1;
        if (params.link == Link::Identity && !garch_nonnegativity_ok(omega, beta, alpha)) {
            std::cerr << "warning: coefficients outside the nonnegativity region "
                         "(omega > 0, alpha >= 0, beta >= alpha)\n";
        }
        const RecursionTrace trace = run_recursion(spec, params, data.y);
        write_output(output, render_recursion_trace_csv(trace));
        return kExitOk;
    }
};

struct VerifyCmd {
    std::string suite = "all";
    std::string output;
    QuadratureFlags quad;

    int run() const {
        const auto reports = run_identity_suite(verify_suite_from_name(suite), quad.resolve());
        json arr = json::array();
        bool all_pass = true;
        for (const auto& r : reports) {
            arr.push_back({{"identity_id", identity_name(r.identity_id)},
                           {"lhs", r.lhs},
                           {"rhs", r.rhs},
                           {"abs_gap", r.abs_gap},
                           {"tolerance", r.tolerance},
                           {"pass", r.pass}});
            all_pass = all_pass && r.pass;
        }
        write_output(output, arr.dump(2) + "\n");
        if (!all_pass) {
            std::cerr << "verify-identities: at least one identity check failed\n";
            return kExitValidation;
        }
        return kExitOk;
    }
};

struct ExpansionCmd {
    std::string family = "gaussian_location";
    double phi = 1.0;
    double a = 0.0;
    double y = 1.0;
    std::vector<double> pgrid = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::string output;
    QuadratureFlags quad;

    int run() const {
        const EdmSpec spec = spec_from_flags(family, phi);
        const QuadratureConfig cfg = quad.resolve_for(PriorSpec::gaussian(a, pgrid.front()));
        const ExpansionStudy study = expansion_order_study(spec, a, y, pgrid, cfg);
        write_output(output, render_expansion_study_csv(study));
        return kExitOk;
    }
};

struct FitCmd {
    std::string family = "gaussian_variance";
    double phi = 1.0;
    std::string link = "identity";
    double d = 1.0;
    std::string input;
    std::string output;
    double omega0 = 0.1, beta0 = 0.9, alpha0 = 0.05;

    int run() const {
        const EdmSpec spec = spec_from_flags(family, phi);
        const SeriesData data = read_series_csv(input);
        const Link lk = link == "log" ? Link::Log : Link::Identity;
        RecursionParams init;
        init.omega = omega0;
        init.beta = beta0;
        init.alpha = alpha0;
        init.d = d;
        init.link = lk;
        const FitResult fit =
            fit_params(spec, data.y, lk, d, init, FitBounds::defaults_for(spec, lk));
        json j = {{"omega", fit.params.omega}, {"beta", fit.params.beta},
                  {"alpha", fit.params.alpha}, {"loglik", fit.loglik},
                  {"converged", fit.converged}};
        write_output(output, j.dump(2) + "\n");
        return kExitOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Score-driven filtering for exponential dispersion models"};
    app.require_subcommand(1);
    app.set_config("--config", "", "JSON config file (flags override it)");
    app.config_formatter(std::make_shared<ConfigJson>());

    SimulateCmd sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate seeded data and write CSV");
    sim_cmd->add_option("--dgp", sim.dgp, "data generating process")
        ->check(CLI::IsMember({"garch11", "nef-constant", "nef-random-walk", "local-level"}));
    sim_cmd->add_option("--length", sim.length, "series length")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "random seed");
    sim_cmd->add_option("--omega-g", sim.omega_g, "GARCH omega_G");
    sim_cmd->add_option("--alpha-g", sim.alpha_g, "GARCH alpha_G");
    sim_cmd->add_option("--beta-g", sim.beta_g, "GARCH beta_G");
    sim_cmd->add_option("--family", sim.family, "observation family");
    sim_cmd->add_option("--mu", sim.mu, "constant mean");
    sim_cmd->add_option("--phi", sim.phi, "dispersion");
    sim_cmd->add_option("--step-sd", sim.step_sd, "random-walk step scale");
    sim_cmd->add_option("--state-var", sim.state_var, "local-level state variance");
    sim_cmd->add_option("--obs-var", sim.obs_var, "local-level observation variance");
    sim_cmd->add_option("--output", sim.output, "output CSV path (default stdout)");

    FilterCmd filter;
    auto* filter_cmd = app.add_subcommand("filter", "Run a conjugate or score-driven filter");
    filter_cmd->add_option("--mode", filter.mode, "conjugate or score")
        ->check(CLI::IsMember({"conjugate", "score"}));
    filter_cmd->add_option("--family", filter.family, "observation family")->required();
    filter_cmd->add_option("--phi", filter.phi, "dispersion");
    filter_cmd->add_option("--input", filter.input, "input CSV with a y column")->required();
    filter_cmd->add_option("--output", filter.output, "output CSV path (default stdout)");
    filter_cmd->add_option("--delta", filter.delta, "discount factor in (0,1)");
    filter_cmd->add_option("--mu0", filter.mu0, "initial mean (default: series mean)");
    filter_cmd->add_option("--omega", filter.omega, "recursion intercept");
    filter_cmd->add_option("--beta", filter.beta, "recursion persistence");
    filter_cmd->add_option("--alpha", filter.alpha, "score loading");
    filter_cmd->add_option("--d", filter.d, "scaling exponent (0, 1/2, 1, ...)");
    filter_cmd->add_option("--link", filter.link, "identity or log")
        ->check(CLI::IsMember({"identity", "log"}));
    filter_cmd->add_option("--theta1", filter.theta1, "initial recursion parameter");

    VerifyCmd verify;
    auto* verify_cmd = app.add_subcommand("verify-identities", "Check the Bayesian identities");
    verify_cmd->add_option("--suite", verify.suite, "lemma1, lemma2, lemma3, prop2 or all")
        ->check(CLI::IsMember({"lemma1", "lemma2", "lemma3", "prop2", "all"}));
    verify_cmd->add_option("--output", verify.output, "output JSON path (default stdout)");
    verify.quad.attach(verify_cmd);

    ExpansionCmd expansion;
    auto* exp_cmd = app.add_subcommand("expansion-study", "Measure the correction expansion order");
    exp_cmd->add_option("--family", expansion.family, "observation family")->required();
    exp_cmd->add_option("--phi", expansion.phi, "dispersion");
    exp_cmd->add_option("--a", expansion.a, "predictive mean")->required();
    exp_cmd->add_option("--y", expansion.y, "observation")->required();
    exp_cmd->add_option("--pgrid", expansion.pgrid, "decreasing predictive variances")
        ->delimiter(',');
    exp_cmd->add_option("--output", expansion.output, "output CSV path (default stdout)");
    expansion.quad.attach(exp_cmd);

    FitCmd fit;
    auto* fit_cmd = app.add_subcommand("fit", "Maximize the prediction-error log likelihood");
    fit_cmd->add_option("--family", fit.family, "observation family")->required();
    fit_cmd->add_option("--phi", fit.phi, "dispersion");
    fit_cmd->add_option("--link", fit.link, "identity or log")
        ->check(CLI::IsMember({"identity", "log"}));
    fit_cmd->add_option("--d", fit.d, "scaling exponent");
    fit_cmd->add_option("--input", fit.input, "input CSV with a y column")->required();
    fit_cmd->add_option("--output", fit.output, "output JSON path (default stdout)");
    fit_cmd->add_option("--omega0", fit.omega0, "initial omega");
    fit_cmd->add_option("--beta0", fit.beta0, "initial beta");
    fit_cmd->add_option("--alpha0", fit.alpha0, "initial alpha");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (sim_cmd->parsed()) return sim.run();
        if (filter_cmd->parsed()) return filter.run();
        if (verify_cmd->parsed()) return verify.run();
        if (exp_cmd->parsed()) return expansion.run();
        if (fit_cmd->parsed()) return fit.run();
        std::cerr << "no subcommand given\n";
        return kExitValidation;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
