// SPDX-License-Identifier: Apache-2.0
//
// sbce — sparse Bayesian channel estimation for pilot-assisted OFDM
// Copyright (C) 2026 the sbce contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command line front end: `simulate` runs seeded Monte Carlo experiments,
// `priors sweep` tabulates the hierarchical prior densities, `selftest`
// replays a condensed set of the oracle-backed invariants.
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <CLI11.hpp>

#include <sbce/harness.hpp>
#include <sbce/model.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace {

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config_path;
    std::string scenario, trials, seed, snr_list, pilots_list, estimators, out;
    std::string workers, kappa, rwf_design_snr_db;
    bool timings = false;
};

int run_simulate(const SimulateArgs &args, bool any_flag) {
    if (args.config_path.empty() && !any_flag) {
        std::cerr << "simulate: provide a config file or at least one override flag\n"
                  << "usage: sbce simulate [config] [--scenario S] [--trials T] "
                     "[--seed N] [--snr-db-list ...] [--pilots-list ...] "
                     "[--estimators ...] [--out PATH]\n";
        return 2;
    }

    sbce::ExperimentConfig config;
    if (!args.config_path.empty()) config = sbce::read_config_file(args.config_path);

    const std::pair<const char *, const std::string *> overrides[] = {
        {"scenario", &args.scenario},       {"trials", &args.trials},
        {"master_seed", &args.seed},        {"snr_grid_db", &args.snr_list},
        {"pilot_grid", &args.pilots_list},  {"estimators", &args.estimators},
        {"output_path", &args.out},         {"workers", &args.workers},
        {"kappa", &args.kappa},             {"rwf_design_snr_db", &args.rwf_design_snr_db},
    };
    for (const auto &[key, value] : overrides)
        if (!value->empty()) sbce::detail::apply_config_entry(config, key, *value);
    if (args.timings) config.timings = true;

    config.finalize();
    config.validate();

    const auto rows = sbce::run_experiment(config);
    const auto aggregates = sbce::aggregate_results(rows);
    sbce::write_csv(rows, aggregates, config.output_path, config.scenario);
    std::printf("wrote %zu trial rows to %s and %zu aggregate rows to %s\n", rows.size(),
                config.output_path.c_str(), aggregates.size(),
                sbce::aggregate_path_for(config.output_path).c_str());
    return 0;
}

// ------------------------------------------------------------ priors sweep

struct SweepArgs {
    std::string epsilon_list = "0,0.5,1,1.5";
    double eta = 1.0;
    bool three_layer = false;
    double a = 1.0;
    double b = 1e-6;
    double alpha_min = 0.01;
    double alpha_max = 3.0;
    int points = 300;
    std::string out; // empty: stdout
};

int run_priors_sweep(const SweepArgs &args) {
    if (args.points < 2) throw std::invalid_argument("sweep: points must be >= 2");
    if (!(args.alpha_max > args.alpha_min) || args.alpha_min < 0.0)
        throw std::invalid_argument("sweep: need 0 <= alpha-min < alpha-max");
    std::vector<double> epsilons;
    for (const auto &item : sbce::detail::split_list(args.epsilon_list))
        epsilons.push_back(sbce::detail::parse_double(item));
    if (epsilons.empty()) throw std::invalid_argument("sweep: empty epsilon list");

    std::ostringstream body;
    body << "alpha_abs,epsilon,log_density\n";
    for (double eps : epsilons)
        for (int i = 0; i < args.points; ++i) {
            const double alpha =
                args.alpha_min +
                (args.alpha_max - args.alpha_min) * i / (args.points - 1);
            const double value = args.three_layer
                                     ? sbce::log_prior_3L(alpha, eps, args.a, args.b)
                                     : sbce::log_prior_2L(alpha, eps, args.eta);
            body << sbce::detail::format_g9(alpha) << ',' << sbce::detail::format_g9(eps)
                 << ',' << sbce::detail::format_g9(value) << '\n';
        }

    if (args.out.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("sweep: cannot open '" + args.out + "'");
        file << body.str();
        if (!file) throw std::runtime_error("sweep: short write to '" + args.out + "'");
        std::printf("wrote %d rows to %s\n",
                    args.points * static_cast<int>(epsilons.size()), args.out.c_str());
    }
    return 0;
}

// ---------------------------------------------------------------- selftest

Eigen::MatrixXcd dft_matrix(int n) {
    Eigen::MatrixXcd f(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            f(i, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                                 -2.0 * std::numbers::pi * i * j / n);
    return f;
}

Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = std::complex<double>(normal(rng), normal(rng));
    return m;
}

bool check_bessel_half_integer() {
    for (double z : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double expected = 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z;
        if (std::abs(sbce::log_bessel_k(0.5, z) - expected) > 1e-10) return false;
    }
    return true;
}

bool check_gig_moments() {
    sbce::GigParams params;
    params.order = -1.0;
    params.rate = 1.0;
    params.inverse_rate = 1.0;
    if (std::abs(sbce::gig_moment(params, -1) - 1.814307758763789490) > 1e-11)
        return false;
    params.order = 2.0;
    params.rate = 3.0;
    params.inverse_rate = 0.0;
    return std::abs(sbce::gig_moment(params, 1) - 2.0 / 3.0) < 1e-12;
}

bool check_laplace_reduction() {
    const double alpha = 0.7, eta = 2.3;
    const double expected =
        std::log(2.0 * eta / std::numbers::pi) - 2.0 * std::sqrt(eta) * alpha;
    return std::abs(sbce::log_prior_2L(alpha, 1.5, eta) - expected) < 1e-10;
}

bool check_three_layer_value() {
    return std::abs(sbce::log_prior_3L(1.0, 1.0, 1.0, 1.0) - (-2.791377965777704261)) <
           1e-6;
}

bool check_dictionary() {
    const auto pattern = sbce::equispaced_pilots(64, 8);
    if (pattern.pilot_indices.front() != 1 || pattern.pilot_indices.back() != 57)
        return false;
    const auto grid = sbce::build_delay_grid(144.0 * 32.55e-9, 12);
    const auto dict = sbce::build_dictionary(pattern, grid, sbce::DictionaryRows::pilots_only);
    for (int i = 0; i < dict.matrix.rows(); ++i)
        for (int j = 0; j < dict.matrix.cols(); ++j)
            if (std::abs(std::abs(dict.matrix(i, j)) - 1.0) > 1e-14) return false;
    return (dict.matrix.col(0) - Eigen::VectorXcd::Ones(8)).norm() == 0.0;
}

bool check_channel_statistics() {
    sbce::RandomStream rng(123);
    const auto params = sbce::ChannelParams::defaults();
    double paths = 0.0, power = 0.0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        const auto ch = sbce::sample_channel(rng, params);
        paths += ch.num_paths;
        for (const auto &g : ch.gains) power += std::norm(g);
    }
    return std::abs(paths / draws - 10.0) < 0.2 && std::abs(power / draws - 1.0) < 0.05;
}

bool check_gaussian_update() {
    std::mt19937_64 rng(99);
    const int m = 8, L = 12;
    sbce::Dictionary dict;
    dict.matrix = random_matrix(m, L, rng);
    const Eigen::VectorXcd y = random_matrix(m, 1, rng).col(0);
    sbce::PosteriorState state;
    state.alpha_mean = Eigen::VectorXcd::Zero(L);
    state.alpha_cov_diag = Eigen::VectorXd::Zero(L);
    state.gamma_inv_mean = Eigen::VectorXd::Constant(L, 0.7);
    state.gamma_mean = Eigen::VectorXd::Constant(L, 1.0 / 0.7);
    state.eta_mean = Eigen::VectorXd::Ones(L);
    state.lambda_mean = 1.3;
    state.active.assign(L, true);

    Eigen::MatrixXcd a = state.lambda_mean * (dict.matrix.adjoint() * dict.matrix);
    a.diagonal() += state.gamma_inv_mean.cast<std::complex<double>>();
    const Eigen::MatrixXcd sigma = a.inverse();
    const Eigen::VectorXcd alpha = state.lambda_mean * (sigma * (dict.matrix.adjoint() * y));

    const auto out = sbce::update_alpha(state, dict, y);
    return (out.alpha_mean - alpha).norm() < 1e-10 * alpha.norm() &&
           (out.alpha_cov_diag - sigma.diagonal().real()).cwiseAbs().maxCoeff() < 1e-10;
}

bool check_lasso_soft_threshold() {
    const int n = 8;
    sbce::Dictionary dict;
    dict.matrix = dft_matrix(n);
    std::mt19937_64 rng(5);
    const Eigen::VectorXcd y = random_matrix(n, 1, rng).col(0);
    const double kappa = 1.3;
    const auto report = sbce::estimate_lasso(y, dict, dict, kappa);
    const Eigen::VectorXcd proj = dict.matrix.adjoint() * y;
    for (int l = 0; l < n; ++l) {
        const double mag = std::abs(proj(l));
        std::complex<double> expected = 0.0;
        if (mag > kappa / 2.0) expected = proj(l) * ((mag - kappa / 2.0) / mag);
        if (std::abs(report.alpha_hat(l) - expected) > 1e-8) return false;
    }
    return true;
}

bool check_rwf_identity() {
    const int n = 32;
    sbce::PilotPattern pattern;
    pattern.num_subcarriers = n;
    for (int i = 1; i <= n; ++i) pattern.pilot_indices.push_back(i);
    const double tau_max = 1.0 / pattern.subcarrier_spacing;
    std::mt19937_64 rng(31);
    const Eigen::VectorXcd h = random_matrix(n, 1, rng).col(0);
    const auto report = sbce::estimate_rwf(
        h, pattern, n, std::numeric_limits<double>::infinity(), tau_max);
    return (report.h_hat - h).norm() < 1e-10 * h.norm();
}

bool check_nmse_identities() {
    Eigen::VectorXcd h(2);
    h << std::complex<double>(1, 2), std::complex<double>(-3, 0.5);
    return sbce::compute_nmse(h, h) == 0.0 &&
           std::abs(sbce::compute_nmse(Eigen::VectorXcd::Zero(2), h) - 1.0) < 1e-15 &&
           std::abs(sbce::compute_nmse(2 * h, h) - 1.0) < 1e-15;
}

bool check_experiment_determinism() {
    sbce::ExperimentConfig config;
    config.scenario = sbce::Scenario::single_run;
    config.snr_grid_db = {15.0};
    config.pilot_grid = {20};
    config.trials = 2;
    config.master_seed = 7;
    config.estimators = {sbce::EstimatorId::vmp3l};
    config.N = 240;
    config.L = 30;
    config.finalize();
    const auto a = sbce::run_experiment(config);
    const auto b = sbce::run_experiment(config);
    if (a.size() != 2 || b.size() != 2) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].nmse != b[i].nmse || !std::isfinite(a[i].nmse)) return false;
    return true;
}

bool check_config_entries() {
    sbce::ExperimentConfig config;
    sbce::detail::apply_config_entry(config, "scenario", "mse_vs_pilots");
    sbce::detail::apply_config_entry(config, "pilot_grid", "60, 80");
    sbce::detail::apply_config_entry(config, "trials", "9");
    sbce::detail::apply_config_entry(config, "estimators", "rwf,vmp2l");
    if (config.scenario != sbce::Scenario::mse_vs_pilots) return false;
    if (config.pilot_grid != std::vector<int>{60, 80}) return false;
    if (config.trials != 9 || config.estimators.size() != 2) return false;
    try {
        sbce::detail::apply_config_entry(config, "no_such_key", "1");
        return false;
    } catch (const std::invalid_argument &) {}
    return true;
}

int run_selftest() {
    struct Check {
        const char *name;
        std::function<bool()> fn;
    };
    const Check checks[] = {
        {"log_bessel_k half-integer closed form", check_bessel_half_integer},
        {"gig_moment frozen ratio and Gamma limit", check_gig_moments},
        {"two-layer prior Laplace reduction", check_laplace_reduction},
        {"three-layer prior frozen value", check_three_layer_value},
        {"dictionary structure", check_dictionary},
        {"channel statistics", check_channel_statistics},
        {"gaussian update dense agreement", check_gaussian_update},
        {"lasso orthonormal soft threshold", check_lasso_soft_threshold},
        {"rwf full-observation identity", check_rwf_identity},
        {"nmse identities", check_nmse_identities},
        {"experiment determinism", check_experiment_determinism},
        {"config entry parsing", check_config_entries},
    };
    int passed = 0, failed = 0;
    for (const auto &check : checks) {
        bool ok = false;
        try {
            ok = check.fn();
        } catch (const std::exception &err) {
            std::printf("FAIL %s (%s)\n", check.name, err.what());
            ++failed;
            continue;
        }
        std::printf("%s %s\n", ok ? "ok  " : "FAIL", check.name);
        ok ? ++passed : ++failed;
    }
    std::printf("selftest: %d passed, %d failed\n", passed, failed);
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"sbce — sparse Bayesian channel estimation simulator"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto *sim = app.add_subcommand("simulate", "run a seeded Monte Carlo experiment");
    sim->add_option("config", sim_args.config_path,
                    "plain-text configuration file (key = value)");
    auto *f_scenario = sim->add_option("--scenario", sim_args.scenario,
                                       "mse_vs_snr, mse_vs_pilots or single_run");
    auto *f_trials = sim->add_option("--trials", sim_args.trials, "trials per grid point");
    auto *f_seed = sim->add_option("--seed", sim_args.seed, "master seed");
    auto *f_snr = sim->add_option("--snr-db-list", sim_args.snr_list,
                                  "comma-separated SNR grid in dB");
    auto *f_pilots = sim->add_option("--pilots-list", sim_args.pilots_list,
                                     "comma-separated pilot counts");
    auto *f_est = sim->add_option("--estimators", sim_args.estimators,
                                  "comma-separated subset of lasso,rvm,rwf,vmp2l,vmp3l");
    auto *f_out = sim->add_option("--out", sim_args.out, "raw CSV output path");
    auto *f_workers = sim->add_option("--workers", sim_args.workers, "worker thread count");
    auto *f_kappa = sim->add_option("--kappa", sim_args.kappa, "lasso penalty weight");
    auto *f_rwf = sim->add_option("--rwf-design-snr-db", sim_args.rwf_design_snr_db,
                                  "fixed RWF design SNR (default: operating SNR)");
    auto *f_timings = sim->add_flag("--timings", sim_args.timings,
                                    "record wall times (breaks byte determinism)");

    SweepArgs sweep_args;
    auto *priors = app.add_subcommand("priors", "prior density diagnostics");
    priors->require_subcommand(1);
    auto *sweep = priors->add_subcommand(
        "sweep", "tabulate log prior density over a grid of |alpha|");
    sweep->add_option("--epsilon", sweep_args.epsilon_list, "comma-separated shape values");
    sweep->add_option("--eta", sweep_args.eta, "two-layer rate parameter");
    sweep->add_flag("--three-layer", sweep_args.three_layer,
                    "sweep the three-layer marginal instead");
    sweep->add_option("--a", sweep_args.a, "three-layer hyperprior shape");
    sweep->add_option("--b", sweep_args.b, "three-layer hyperprior rate");
    sweep->add_option("--alpha-min", sweep_args.alpha_min, "grid start");
    sweep->add_option("--alpha-max", sweep_args.alpha_max, "grid end");
    sweep->add_option("--points", sweep_args.points, "grid size");
    sweep->add_option("--out", sweep_args.out, "CSV path (default: stdout)");

    auto *selftest =
        app.add_subcommand("selftest", "replay condensed oracle-backed invariants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (sim->parsed()) {
            const bool any_flag = f_scenario->count() || f_trials->count() ||
                                  f_seed->count() || f_snr->count() || f_pilots->count() ||
                                  f_est->count() || f_out->count() || f_workers->count() ||
                                  f_kappa->count() || f_rwf->count() || f_timings->count();
            return run_simulate(sim_args, any_flag);
        }
        if (sweep->parsed()) return run_priors_sweep(sweep_args);
        if (selftest->parsed()) return run_selftest();
    } catch (const std::invalid_argument &err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception &err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
