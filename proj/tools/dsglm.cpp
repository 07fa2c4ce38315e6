// dsglm: coefficient estimation for downsampled imbalanced binary GLMs.
//
// Subcommands: simulate, fit, sweep, optimal-alpha. All randomness derives
// from the resolved seed; identical invocations produce byte-identical
// outputs. Exit codes: 0 success, 2 usage, 3 data error, 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dsglm/asymptotics.hpp"
#include "dsglm/csv.hpp"
#include "dsglm/errors.hpp"
#include "dsglm/estimators.hpp"
#include "dsglm/experiments.hpp"
#include "dsglm/link.hpp"
#include "dsglm/sampling.hpp"

using json = nlohmann::ordered_json;

namespace {

int exit_code_for(dsglm::ErrorClass cls) {
    switch (cls) {
        case dsglm::ErrorClass::Usage: return 2;
        case dsglm::ErrorClass::Data: return 3;
        case dsglm::ErrorClass::Numeric: return 4;
    }
    return 4;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos);
        double v;
        dsglm::require(dsglm::csv::detail::parse_double(tok, v),
                       dsglm::ErrorCode::InvalidArgument,
                       "cannot parse number '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    dsglm::require(!out.empty(), dsglm::ErrorCode::InvalidArgument,
                   "empty number list");
    return out;
}

Eigen::VectorXd parse_theta(const std::string& text) {
    const std::vector<double> v = parse_double_list(text);
    Eigen::VectorXd theta(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        theta[static_cast<Eigen::Index>(i)] = v[i];
    return theta;
}

std::vector<dsglm::Estimator> parse_estimators(const std::string& text) {
    std::vector<dsglm::Estimator> out;
    if (text.empty() || text == "none") return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos);
        out.push_back(dsglm::estimator_from_name(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// Flag > config file > DSGLM_SEED env (seed only) > built-in default.
class ConfigMerger {
  public:
    void load(const std::string& path) {
        if (path.empty()) return;
        std::ifstream in(path);
        dsglm::require(in.good(), dsglm::ErrorCode::IoError,
                       "cannot open config file " + path);
        try {
            in >> cfg_;
        } catch (const std::exception& e) {
            dsglm::fail(dsglm::ErrorCode::InvalidArgument,
                        std::string("config file is not valid JSON: ") +
                            e.what());
        }
    }

    // Overlay `target` with config section/key when the flag was not given.
    template <typename T>
    void merge(const CLI::Option* opt, const std::string& section,
               const std::string& key, T& target) const {
        if (opt != nullptr && opt->count() > 0) return;
        const json* node = find(section, key);
        if (node == nullptr) return;
        try {
            target = node->get<T>();
        } catch (const std::exception&) {
            dsglm::fail(dsglm::ErrorCode::InvalidArgument,
                        "config key '" + key + "' has the wrong type");
        }
    }

    void merge_seed(const CLI::Option* opt, const std::string& section,
                    std::uint64_t& seed) const {
        if (opt != nullptr && opt->count() > 0) return;
        if (const json* node = find(section, "seed")) {
            seed = node->get<std::uint64_t>();
            return;
        }
        if (const char* env = std::getenv("DSGLM_SEED")) {
            double v;
            dsglm::require(dsglm::csv::detail::parse_double(env, v),
                           dsglm::ErrorCode::InvalidArgument,
                           "DSGLM_SEED is not a number");
            seed = static_cast<std::uint64_t>(v);
        }
    }

    const json& raw() const { return cfg_; }

  private:
    const json* find(const std::string& section, const std::string& key) const {
        if (cfg_.is_null()) return nullptr;
        if (cfg_.contains(section) && cfg_[section].contains(key)) {
            return &cfg_[section][key];
        }
        if (cfg_.contains(key) && !cfg_[key].is_object()) return &cfg_[key];
        return nullptr;
    }

    json cfg_;
};

json fit_result_to_json(const dsglm::FitResult& fr) {
    json j;
    j["estimator"] = dsglm::estimator_name(fr.estimator);
    j["theta_hat"] = std::vector<double>(
        fr.theta_hat.data(), fr.theta_hat.data() + fr.theta_hat.size());
    j["objective"] = fr.objective;
    j["grad_norm"] = fr.grad_norm;
    j["iterations"] = fr.iterations;
    j["converged"] = fr.converged;
    j["status"] = dsglm::fit_status_name(fr.status);
    return j;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::int64_t n = 0;
    int dim = 1;
    std::string theta = "0.5";
    double tau = 0.0;
    std::string link = "logistic";
    double gamma = 2.0;
    bool scaled = false;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& a, const json& resolved) {
    dsglm::require(a.n >= 1, dsglm::ErrorCode::InvalidArgument,
                   "--n must be >= 1");
    dsglm::SyntheticSpec spec;
    spec.link = dsglm::link_from_name(a.link, a.gamma);
    spec.theta_star = parse_theta(a.theta);
    dsglm::require(spec.theta_star.size() == a.dim,
                   dsglm::ErrorCode::InvalidArgument,
                   "--theta must list exactly --dim coefficients");
    spec.tau_n = a.tau;
    spec.n = a.n;
    spec.covariate_law = dsglm::CovariateLaw::uniform_unit_cube(a.dim);
    spec.scaled = a.scaled;
    spec.seed = a.seed;

    const dsglm::Dataset data = dsglm::generate(spec);
    dsglm::csv::write_file(a.out, dsglm::csv::dataset_to_csv(data));

    json j;
    j["n"] = data.n();
    j["n_pos"] = data.n_pos;
    j["positive_rate"] = data.positive_rate();
    j["out"] = a.out;
    j["config"] = resolved;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    std::string data;
    std::string label = "y";
    std::string tau = "auto";
    double alpha = 1.0;
    std::string estimator = "pseudo";
    std::string link = "logistic";
    double gamma = 2.0;
    double grad_tol = 1e-8;
    int max_iter = 200;
    std::uint64_t seed = 0;
};

int run_fit(const FitArgs& a, const json& resolved) {
    const dsglm::Dataset data = dsglm::csv::load_csv(a.data, a.label);
    const dsglm::LinkSpec link = dsglm::link_from_name(a.link, a.gamma);
    double tau;
    if (a.tau == "auto") {
        tau = dsglm::tau_from_positive_rate(data.positive_rate());
    } else {
        dsglm::require(dsglm::csv::detail::parse_double(a.tau, tau),
                       dsglm::ErrorCode::InvalidArgument,
                       "--tau must be a number or 'auto'");
    }
    const dsglm::Estimator est = dsglm::estimator_from_name(a.estimator);
    dsglm::FitConfig cfg;
    cfg.grad_tol = a.grad_tol;
    cfg.max_iter = a.max_iter;

    dsglm::CovariateLaw density =
        dsglm::CovariateLaw::uniform_unit_cube(std::min(data.dim(), 3));
    if (est == dsglm::Estimator::ExactMLE) {
        dsglm::require(data.dim() <= 3, dsglm::ErrorCode::UnsupportedDimension,
                       "exact MLE quadrature supports d <= 3, got " +
                           std::to_string(data.dim()));
        density = dsglm::CovariateLaw::uniform_unit_cube(data.dim());
    }
    const dsglm::FitResult fr =
        dsglm::fit(est, data, tau, a.alpha, link, cfg, &density);

    json j = fit_result_to_json(fr);
    j["tau"] = tau;
    j["alpha"] = a.alpha;
    j["n"] = data.n();
    j["n_pos"] = data.n_pos;
    j["config"] = resolved;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
    std::string mode;  // synthetic | real
    std::string alphas;
    int reps = 500;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string estimators = "pseudo,inverse_weighting,conditional";
    std::string out;
    std::string json_out;
    // synthetic
    std::int64_t n = 100000;
    int dim = 1;
    std::string theta = "0.5";
    double tau = 6.0;
    std::string link = "logistic";
    double gamma = 2.0;
    bool scaled = false;
    // real
    std::string data;
    std::string label = "y";
    double train_frac = 0.8;
    std::string real_tau = "auto";
    bool standardize = false;
    bool score_g = false;
};

int run_sweep(const SweepArgs& a, const json& resolved) {
    dsglm::require(a.mode == "synthetic" || a.mode == "real",
                   dsglm::ErrorCode::InvalidArgument,
                   "--mode must be 'synthetic' or 'real'");
    dsglm::SweepResult result;
    if (a.mode == "synthetic") {
        dsglm::SweepSpec spec;
        spec.synthetic.link = dsglm::link_from_name(a.link, a.gamma);
        spec.synthetic.theta_star = parse_theta(a.theta);
        dsglm::require(spec.synthetic.theta_star.size() == a.dim,
                       dsglm::ErrorCode::InvalidArgument,
                       "--theta must list exactly --dim coefficients");
        spec.synthetic.tau_n = a.tau;
        spec.synthetic.n = a.n;
        spec.synthetic.covariate_law =
            dsglm::CovariateLaw::uniform_unit_cube(a.dim);
        spec.synthetic.scaled = a.scaled;
        spec.alphas = parse_double_list(a.alphas);
        spec.estimators = parse_estimators(a.estimators);
        spec.replications = a.reps;
        spec.master_seed = a.seed;
        spec.threads = a.threads;
        result = dsglm::run_mse_sweep(spec);
    } else {
        dsglm::RealDataSpec spec;
        spec.csv_path = a.data;
        spec.label_column = a.label;
        if (!a.alphas.empty()) spec.alphas = parse_double_list(a.alphas);
        spec.replications = a.reps;
        spec.train_fraction = a.train_frac;
        if (a.real_tau == "auto") {
            spec.tau_rule = dsglm::TauRule::FromPositiveRate;
        } else {
            spec.tau_rule = dsglm::TauRule::Fixed;
            dsglm::require(
                dsglm::csv::detail::parse_double(a.real_tau, spec.tau_fixed),
                dsglm::ErrorCode::InvalidArgument,
                "--tau must be a number or 'auto'");
        }
        spec.master_seed = a.seed;
        spec.estimators = parse_estimators(a.estimators);
        spec.standardize = a.standardize;
        spec.score_via_g = a.score_g;
        spec.threads = a.threads;
        result = dsglm::run_real_data(spec);
    }

    const std::string report = dsglm::to_csv(result);
    if (a.out.empty()) {
        std::cout << report;
    } else {
        dsglm::csv::write_file(a.out, report);
    }
    if (!a.json_out.empty()) {
        json j;
        j["config"] = resolved;
        j["metric"] = result.metric;
        json rows = json::array();
        const int pseudo =
            result.estimator_index(dsglm::Estimator::PseudoMLE);
        for (std::size_t ai = 0; ai < result.alphas.size(); ++ai) {
            for (std::size_t e = 0; e < result.estimators.size(); ++e) {
                const dsglm::CellStats& s = result.cells[ai][e];
                json row;
                row["alpha"] = result.alphas[ai];
                row["estimator"] =
                    dsglm::estimator_name(result.estimators[e]);
                row["metric"] = result.metric;
                row["mean"] = s.mean;
                row["ci_half_width"] = s.ci_half_width;
                row["replications"] = s.replications;
                row["failures"] = s.failures;
                row["valid"] = s.valid();
                rows.push_back(row);
                if (pseudo >= 0 && static_cast<int>(e) != pseudo) {
                    const dsglm::CellStats& d = result.diff_vs_pseudo[ai][e];
                    json drow;
                    drow["alpha"] = result.alphas[ai];
                    drow["estimator"] =
                        dsglm::estimator_name(result.estimators[e]);
                    drow["metric"] = "loss_diff_vs_pseudo";
                    drow["mean"] = d.mean;
                    drow["ci_half_width"] = d.ci_half_width;
                    drow["replications"] = d.replications;
                    drow["failures"] = d.failures;
                    drow["valid"] = d.valid();
                    rows.push_back(drow);
                }
            }
        }
        j["cells"] = rows;
        dsglm::csv::write_file(a.json_out, j.dump(2) + "\n");
    }
    return 0;
}

// ----------------------------------------------------------- optimal-alpha

struct OptimalAlphaArgs {
    std::string link = "logistic";
    double gamma = 2.0;
    std::string theta = "0.5";
    double tau = 10.0;
    std::string data;       // moments from a covariate sample
    std::string label = "y";
    std::string density;    // or from a known density ("uniform")
    int dim = 1;
    double p1 = 0.0;
    int curve_points = 0;   // optional efficiency curve on a log grid
    double curve_min = 1e-6;
    double curve_max = 1.0;
};

int run_optimal_alpha(const OptimalAlphaArgs& a, const json& resolved) {
    const dsglm::LinkSpec link = dsglm::link_from_name(a.link, a.gamma);
    const Eigen::VectorXd theta = parse_theta(a.theta);

    dsglm::TailMoments moments;
    if (!a.data.empty()) {
        const dsglm::Dataset data = dsglm::csv::load_csv(a.data, a.label);
        dsglm::require(data.dim() == theta.size(),
                       dsglm::ErrorCode::InvalidArgument,
                       "--theta dimension must match the data");
        moments = dsglm::tail_moments(link, theta, data.X);
    } else {
        dsglm::require(a.density == "uniform",
                       dsglm::ErrorCode::InvalidArgument,
                       "--density supports only 'uniform' (unit cube)");
        dsglm::require(theta.size() == a.dim,
                       dsglm::ErrorCode::InvalidArgument,
                       "--theta must list exactly --dim coefficients");
        moments = dsglm::tail_moments(
            link, theta, dsglm::CovariateLaw::uniform_unit_cube(a.dim));
    }

    const dsglm::OptimalAlphaResult res =
        dsglm::optimal_alpha(link, moments, a.tau);
    json j;
    j["alpha_star"] = res.alpha_star;
    j["alpha_star_raw"] = res.alpha_star_raw;
    j["out_of_regime"] = res.out_of_regime;
    if (res.out_of_regime) j["flag"] = "OutOfRegime";
    j["trace_outer"] = res.trace_outer;
    j["trace_inner"] = res.trace_inner;
    j["moment_source"] =
        moments.source == dsglm::MomentSource::Quadrature ? "quadrature"
                                                          : "empirical_sample";

    if (a.curve_points > 0) {
        std::vector<double> grid(static_cast<std::size_t>(a.curve_points));
        const double lmin = std::log(a.curve_min);
        const double lmax = std::log(a.curve_max);
        for (int i = 0; i < a.curve_points; ++i) {
            const double t = a.curve_points == 1
                                 ? 0.0
                                 : static_cast<double>(i) /
                                       static_cast<double>(a.curve_points - 1);
            grid[static_cast<std::size_t>(i)] = std::exp(lmin + t * (lmax - lmin));
        }
        const dsglm::EfficiencyCurve curve =
            dsglm::efficiency_cost_curve(link, moments, a.tau, a.p1, grid);
        json jc;
        jc["alphas"] = curve.alphas;
        jc["cost"] = curve.cost;
        jc["cost_surrogate"] = curve.cost_surrogate;
        jc["argmin_alpha"] =
            curve.alphas[static_cast<std::size_t>(curve.argmin_index)];
        jc["kappa_at_star"] = curve.condition_number_kappa;
        jc["p1"] = curve.p1;
        j["efficiency_curve"] = jc;
    }
    j["config"] = resolved;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"downsampled-GLM estimation toolkit"};
    app.require_subcommand(1);
    // global flags (--config) may appear after the subcommand name
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config file; explicit flags take precedence");

    SimulateArgs sim;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "generate a synthetic rare-event dataset");
    auto* sim_n = sim_cmd->add_option("--n", sim.n, "sample size");
    sim_cmd->add_option("--dim", sim.dim, "covariate dimension");
    sim_cmd->add_option("--theta", sim.theta, "true coefficients, comma separated");
    sim_cmd->add_option("--tau", sim.tau, "known intercept tau");
    sim_cmd->add_option("--link", sim.link, "logistic|gaussian|pareto|exponential");
    sim_cmd->add_option("--gamma", sim.gamma, "Pareto tail index");
    sim_cmd->add_flag("--scaled", sim.scaled, "use the r(tau)-scaled model");
    auto* sim_seed = sim_cmd->add_option("--seed", sim.seed, "RNG seed");
    sim_cmd->add_option("--out", sim.out, "output CSV path")->required();

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one estimator on a CSV dataset");
    fit_cmd->add_option("--data", fit_args.data, "input CSV")->required();
    fit_cmd->add_option("--label", fit_args.label, "label column name");
    fit_cmd->add_option("--tau", fit_args.tau, "tau value, or 'auto' for log(1/p1 - 1)");
    fit_cmd->add_option("--alpha", fit_args.alpha, "downsampling rate used for the data");
    fit_cmd->add_option("--estimator", fit_args.estimator,
                        "pseudo|inverse_weighting|conditional|naive|exact|full");
    fit_cmd->add_option("--link", fit_args.link, "link family");
    fit_cmd->add_option("--gamma", fit_args.gamma, "Pareto tail index");
    fit_cmd->add_option("--grad-tol", fit_args.grad_tol, "gradient tolerance");
    fit_cmd->add_option("--max-iter", fit_args.max_iter, "iteration cap");
    auto* fit_seed = fit_cmd->add_option("--seed", fit_args.seed, "seed (echoed for provenance)");

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo or real-data sweep");
    sweep_cmd->add_option("--mode", sweep.mode, "synthetic|real")->required();
    auto* sweep_alphas = sweep_cmd->add_option("--alphas", sweep.alphas,
                                               "downsampling rates, comma separated");
    auto* sweep_reps = sweep_cmd->add_option("--reps", sweep.reps, "replications");
    auto* sweep_seed = sweep_cmd->add_option("--seed", sweep.seed, "master seed");
    auto* sweep_threads = sweep_cmd->add_option("--threads", sweep.threads, "worker threads");
    auto* sweep_estimators = sweep_cmd->add_option(
        "--estimators", sweep.estimators, "comma separated estimator list");
    sweep_cmd->add_option("--out", sweep.out, "report CSV path (stdout when omitted)");
    sweep_cmd->add_option("--json", sweep.json_out, "also write a JSON report here");
    sweep_cmd->add_option("--n", sweep.n, "synthetic: sample size");
    sweep_cmd->add_option("--dim", sweep.dim, "synthetic: dimension");
    sweep_cmd->add_option("--theta", sweep.theta, "synthetic: true coefficients");
    sweep_cmd->add_option("--tau", sweep.tau, "synthetic: tau");
    sweep_cmd->add_option("--link", sweep.link, "synthetic: link family");
    sweep_cmd->add_option("--gamma", sweep.gamma, "synthetic: Pareto tail index");
    sweep_cmd->add_flag("--scaled", sweep.scaled, "synthetic: scaled model");
    sweep_cmd->add_option("--data", sweep.data, "real: input CSV");
    sweep_cmd->add_option("--label", sweep.label, "real: label column");
    sweep_cmd->add_option("--train-frac", sweep.train_frac, "real: train fraction");
    sweep_cmd->add_option("--real-tau", sweep.real_tau, "real: tau value or 'auto'");
    sweep_cmd->add_flag("--standardize", sweep.standardize, "real: z-score features from train stats");
    sweep_cmd->add_flag("--score-g", sweep.score_g, "real: score the test split in the downsample frame");

    OptimalAlphaArgs oa;
    CLI::App* oa_cmd = app.add_subcommand("optimal-alpha",
                                          "closed-form optimal downsampling rate");
    oa_cmd->add_option("--link", oa.link, "link family");
    oa_cmd->add_option("--gamma", oa.gamma, "Pareto tail index");
    oa_cmd->add_option("--theta", oa.theta, "coefficients, comma separated");
    oa_cmd->add_option("--tau", oa.tau, "tau");
    oa_cmd->add_option("--data", oa.data, "covariate sample CSV for the moments");
    oa_cmd->add_option("--label", oa.label, "label column to drop from --data");
    oa_cmd->add_option("--density", oa.density, "density for quadrature moments: uniform");
    oa_cmd->add_option("--dim", oa.dim, "dimension for --density");
    oa_cmd->add_option("--p1", oa.p1, "positive rate for the efficiency curve");
    oa_cmd->add_option("--curve-points", oa.curve_points,
                       "log grid size for an efficiency curve in the output");
    oa_cmd->add_option("--curve-min", oa.curve_min, "curve grid lower end");
    oa_cmd->add_option("--curve-max", oa.curve_max, "curve grid upper end");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            if (code == 0) return 0;
            std::cerr << "code=InvalidArgument\n";
            return 2;
        }

        ConfigMerger config;
        config.load(config_path);

        if (sim_cmd->parsed()) {
            config.merge(sim_n, "simulate", "n", sim.n);
            config.merge_seed(sim_seed, "simulate", sim.seed);
            json resolved;
            resolved["subcommand"] = "simulate";
            resolved["n"] = sim.n;
            resolved["dim"] = sim.dim;
            resolved["theta"] = sim.theta;
            resolved["tau"] = sim.tau;
            resolved["link"] = sim.link;
            resolved["scaled"] = sim.scaled;
            resolved["seed"] = sim.seed;
            resolved["out"] = sim.out;
            return run_simulate(sim, resolved);
        }
        if (fit_cmd->parsed()) {
            config.merge_seed(fit_seed, "fit", fit_args.seed);
            json resolved;
            resolved["subcommand"] = "fit";
            resolved["data"] = fit_args.data;
            resolved["label"] = fit_args.label;
            resolved["tau"] = fit_args.tau;
            resolved["alpha"] = fit_args.alpha;
            resolved["estimator"] = fit_args.estimator;
            resolved["link"] = fit_args.link;
            resolved["grad_tol"] = fit_args.grad_tol;
            resolved["max_iter"] = fit_args.max_iter;
            resolved["seed"] = fit_args.seed;
            return run_fit(fit_args, resolved);
        }
        if (sweep_cmd->parsed()) {
            config.merge(sweep_alphas, "sweep", "alphas", sweep.alphas);
            config.merge(sweep_reps, "sweep", "reps", sweep.reps);
            config.merge(sweep_threads, "sweep", "threads", sweep.threads);
            config.merge_seed(sweep_seed, "sweep", sweep.seed);
            if (sweep_estimators->count() == 0 && sweep.mode == "real") {
                // real-data default: the paired comparison the harness reports
                sweep.estimators = "pseudo,inverse_weighting";
            }
            if (sweep.mode == "synthetic") {
                dsglm::require(!sweep.alphas.empty(),
                               dsglm::ErrorCode::InvalidArgument,
                               "--alphas is required in synthetic mode");
            } else {
                dsglm::require(!sweep.data.empty(),
                               dsglm::ErrorCode::InvalidArgument,
                               "--data is required in real mode");
            }
            json resolved;
            resolved["subcommand"] = "sweep";
            resolved["mode"] = sweep.mode;
            resolved["alphas"] = sweep.alphas;
            resolved["reps"] = sweep.reps;
            resolved["seed"] = sweep.seed;
            resolved["threads"] = sweep.threads;
            resolved["estimators"] = sweep.estimators;
            if (sweep.mode == "synthetic") {
                resolved["n"] = sweep.n;
                resolved["dim"] = sweep.dim;
                resolved["theta"] = sweep.theta;
                resolved["tau"] = sweep.tau;
                resolved["link"] = sweep.link;
                resolved["scaled"] = sweep.scaled;
            } else {
                resolved["data"] = sweep.data;
                resolved["label"] = sweep.label;
                resolved["train_frac"] = sweep.train_frac;
                resolved["tau"] = sweep.real_tau;
                resolved["standardize"] = sweep.standardize;
                resolved["score_g"] = sweep.score_g;
            }
            return run_sweep(sweep, resolved);
        }
        if (oa_cmd->parsed()) {
            json resolved;
            resolved["subcommand"] = "optimal-alpha";
            resolved["link"] = oa.link;
            resolved["theta"] = oa.theta;
            resolved["tau"] = oa.tau;
            resolved["data"] = oa.data;
            resolved["density"] = oa.density;
            resolved["dim"] = oa.dim;
            resolved["p1"] = oa.p1;
            return run_optimal_alpha(oa, resolved);
        }
        std::cerr << "code=InvalidArgument\n";
        return 2;
    } catch (const dsglm::Error& e) {
        std::cerr << "code=" << e.code_name() << "\n" << e.what() << "\n";
        return exit_code_for(dsglm::error_class(e.code()));
    } catch (const std::exception& e) {
        std::cerr << "code=Internal\n" << e.what() << "\n";
        return 4;
    }
}
