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
// Monte Carlo experiment driver: seeded trial generation, estimator
// dispatch, NMSE metrics, CSV persistence and plain-text configuration.
// Raw output is byte-identical for a fixed (config, seed) regardless of
// the worker count: every trial derives its own random stream and rows
// are emitted in canonical (grid point, trial, estimator) order.

#ifndef SBCE_HARNESS_HPP
#define SBCE_HARNESS_HPP

#include <sbce/channel.hpp>
#include <sbce/dictionary.hpp>
#include <sbce/lasso.hpp>
#include <sbce/rng.hpp>
#include <sbce/rvm.hpp>
#include <sbce/rwf.hpp>
#include <sbce/vmp.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sbce {

enum class Scenario { mse_vs_snr, mse_vs_pilots, single_run };

// canonical (alphabetical) order; CSV rows sort by this name
enum class EstimatorId { lasso, rvm, rwf, vmp2l, vmp3l };

inline std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::mse_vs_snr: return "mse_vs_snr";
    case Scenario::mse_vs_pilots: return "mse_vs_pilots";
    case Scenario::single_run: return "single_run";
    }
    throw std::logic_error("to_string: bad scenario");
}

inline Scenario parse_scenario(const std::string &text) {
    if (text == "mse_vs_snr") return Scenario::mse_vs_snr;
    if (text == "mse_vs_pilots") return Scenario::mse_vs_pilots;
    if (text == "single_run") return Scenario::single_run;
    throw std::invalid_argument("unknown scenario '" + text + "'");
}

inline std::string estimator_name(EstimatorId id) {
    switch (id) {
    case EstimatorId::lasso: return "lasso";
    case EstimatorId::rvm: return "rvm";
    case EstimatorId::rwf: return "rwf";
    case EstimatorId::vmp2l: return "vmp2l";
    case EstimatorId::vmp3l: return "vmp3l";
    }
    throw std::logic_error("estimator_name: bad id");
}

inline EstimatorId parse_estimator(const std::string &text) {
    if (text == "lasso") return EstimatorId::lasso;
    if (text == "rvm") return EstimatorId::rvm;
    if (text == "rwf") return EstimatorId::rwf;
    if (text == "vmp2l") return EstimatorId::vmp2l;
    if (text == "vmp3l") return EstimatorId::vmp3l;
    throw std::invalid_argument("unknown estimator '" + text + "'");
}

struct ExperimentConfig {
    Scenario scenario = Scenario::mse_vs_snr;
    std::vector<double> snr_grid_db; // empty: scenario default via finalize()
    std::vector<int> pilot_grid;     // empty: scenario default via finalize()
    int trials = 500;
    std::uint64_t master_seed = 1;
    std::vector<EstimatorId> estimators; // empty: all five
    int N = 1200;
    int L = 200;
    ChannelParams channel = ChannelParams::defaults();
    double kappa = 2.0;
    std::string output_path = "results.csv";
    int workers = 1;
    bool timings = false; // wall_time_s column stays 0 unless enabled
    std::optional<double> rwf_design_snr_db; // default: match operating SNR

    // fill scenario-dependent grid defaults and put estimators in
    // canonical order
    void finalize() {
        if (snr_grid_db.empty()) {
            if (scenario == Scenario::mse_vs_snr)
                for (int s = 0; s <= 24; s += 3) snr_grid_db.push_back(s);
            else
                snr_grid_db.push_back(15.0);
        }
        if (pilot_grid.empty()) {
            if (scenario == Scenario::mse_vs_pilots)
                for (int m = 60; m <= 200; m += 20) pilot_grid.push_back(m);
            else
                pilot_grid.push_back(100);
        }
        if (estimators.empty())
            estimators = {EstimatorId::lasso, EstimatorId::rvm, EstimatorId::rwf,
                          EstimatorId::vmp2l, EstimatorId::vmp3l};
        std::sort(estimators.begin(), estimators.end());
        estimators.erase(std::unique(estimators.begin(), estimators.end()),
                         estimators.end());
    }

    void validate() const {
        if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
        if (snr_grid_db.empty()) throw std::invalid_argument("config: empty SNR grid");
        if (pilot_grid.empty()) throw std::invalid_argument("config: empty pilot grid");
        if (estimators.empty()) throw std::invalid_argument("config: no estimators");
        if (L < 2) throw std::invalid_argument("config: L must be >= 2");
        if (N < 1) throw std::invalid_argument("config: N must be >= 1");
        for (int m : pilot_grid)
            if (m < 1 || m > N)
                throw std::invalid_argument("config: pilot count outside [1, N]");
        for (double s : snr_grid_db)
            if (!std::isfinite(s))
                throw std::invalid_argument("config: non-finite SNR value");
        if (!(kappa > 0.0)) throw std::invalid_argument("config: kappa must be > 0");
        if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
        channel.validate();
    }
};

struct TrialResult {
    int point_index = 0;
    double point = 0.0; // snr_db (mse_vs_snr, single_run) or M (mse_vs_pilots)
    EstimatorId estimator = EstimatorId::vmp3l;
    int trial = 0;
    double nmse = 0.0; // NaN sentinel marks an estimator hard error
    bool converged = false;
    int iterations = 0;
    double wall_time_s = 0.0;
};

struct AggregateRow {
    int point_index = 0;
    double point = 0.0;
    EstimatorId estimator = EstimatorId::vmp3l;
    double mean_nmse = std::numeric_limits<double>::quiet_NaN();
    long trials = 0;   // rows contributing to the mean
    long failures = 0; // rows excluded by the NaN sentinel
};

// raised when the reference channel carries no energy; the harness skips
// the affected trial instead of recording a result
struct SkipTrial : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double compute_nmse(const Eigen::VectorXcd &h_hat, const Eigen::VectorXcd &h_true) {
    if (h_hat.size() != h_true.size())
        throw std::invalid_argument("compute_nmse: length mismatch");
    const double denom = h_true.squaredNorm();
    if (denom == 0.0) throw SkipTrial("compute_nmse: zero reference channel");
    return (h_hat - h_true).squaredNorm() / denom;
}

namespace detail {

struct GridPoint {
    int index = 0;
    double point_value = 0.0;
    double snr_db = 0.0;
    int num_pilots = 0;
};

inline std::vector<GridPoint> make_grid(const ExperimentConfig &config) {
    std::vector<GridPoint> grid;
    switch (config.scenario) {
    case Scenario::mse_vs_snr:
        for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i)
            grid.push_back({static_cast<int>(i), config.snr_grid_db[i],
                            config.snr_grid_db[i], config.pilot_grid.front()});
        break;
    case Scenario::mse_vs_pilots:
        for (std::size_t i = 0; i < config.pilot_grid.size(); ++i)
            grid.push_back({static_cast<int>(i),
                            static_cast<double>(config.pilot_grid[i]),
                            config.snr_grid_db.front(), config.pilot_grid[i]});
        break;
    case Scenario::single_run:
        grid.push_back({0, config.snr_grid_db.front(), config.snr_grid_db.front(),
                        config.pilot_grid.front()});
        break;
    }
    return grid;
}

struct PointContext {
    GridPoint gp;
    PilotPattern pattern;
    Dictionary dict_pilots;
    Dictionary dict_full;
    double snr_linear = 0.0;
    double rwf_design_snr = 0.0;
};

inline PointContext make_point_context(const ExperimentConfig &config, const GridPoint &gp) {
    PointContext ctx;
    ctx.gp = gp;
    ctx.pattern = equispaced_pilots(config.N, gp.num_pilots);
    const DelayGrid grid = build_delay_grid(config.channel.tau_max, config.L);
    ctx.dict_pilots = build_dictionary(ctx.pattern, grid, DictionaryRows::pilots_only);
    ctx.dict_full = build_dictionary(ctx.pattern, grid, DictionaryRows::all_subcarriers);
    ctx.snr_linear = std::pow(10.0, gp.snr_db / 10.0);
    ctx.rwf_design_snr = config.rwf_design_snr_db
                             ? std::pow(10.0, *config.rwf_design_snr_db / 10.0)
                             : ctx.snr_linear;
    return ctx;
}

inline EstimateReport dispatch_estimator(EstimatorId id, const ExperimentConfig &config,
                                         const PointContext &ctx,
                                         const Eigen::VectorXcd &y) {
    switch (id) {
    case EstimatorId::lasso:
        return estimate_lasso(y, ctx.dict_pilots, ctx.dict_full, config.kappa);
    case EstimatorId::rvm:
        return estimate_rvm(y, ctx.dict_pilots, ctx.dict_full);
    case EstimatorId::rwf:
        return estimate_rwf(y, ctx.pattern, config.N, ctx.rwf_design_snr,
                            config.channel.tau_max);
    case EstimatorId::vmp2l:
        return run_vmp(y, ctx.dict_pilots, ctx.dict_full,
                       EstimatorConfig::two_layer(ctx.gp.num_pilots));
    case EstimatorId::vmp3l:
        return run_vmp(y, ctx.dict_pilots, ctx.dict_full,
                       EstimatorConfig::three_layer(config.L));
    }
    throw std::logic_error("dispatch_estimator: bad id");
}

// one (grid point, trial) work item: draw data once, run every estimator
// on it; an empty return means the trial was skipped (zero channel)
inline std::vector<TrialResult> run_trial(const ExperimentConfig &config,
                                          const PointContext &ctx, int trial) {
    RandomStream rng = RandomStream::for_trial(
        config.master_seed, static_cast<std::uint64_t>(ctx.gp.index),
        static_cast<std::uint64_t>(trial));
    const ChannelRealization ch = sample_channel(rng, config.channel);
    const Eigen::VectorXcd h_full =
        frequency_response(ch, ctx.pattern, DictionaryRows::all_subcarriers);
    if (h_full.squaredNorm() == 0.0) return {};
    const Eigen::VectorXcd h_pilots =
        frequency_response(ch, ctx.pattern, DictionaryRows::pilots_only);
    const Eigen::VectorXcd y =
        observe_pilots(h_pilots, ctx.snr_linear, rng, ctx.pattern).y;

    std::vector<TrialResult> rows;
    rows.reserve(config.estimators.size());
    for (EstimatorId id : config.estimators) {
        TrialResult row;
        row.point_index = ctx.gp.index;
        row.point = ctx.gp.point_value;
        row.estimator = id;
        row.trial = trial;
        const auto start = std::chrono::steady_clock::now();
        try {
            const EstimateReport report = dispatch_estimator(id, config, ctx, y);
            row.nmse = compute_nmse(report.h_hat, h_full);
            row.converged = report.converged;
            row.iterations = report.iterations_used;
        } catch (const std::exception &) {
            row.nmse = std::numeric_limits<double>::quiet_NaN();
            row.converged = false;
            row.iterations = 0;
        }
        if (config.timings)
            row.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
        rows.push_back(row);
    }
    return rows;
}

inline std::string format_g9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace detail

inline std::vector<TrialResult> run_experiment(const ExperimentConfig &config) {
    config.validate();
    const auto grid = detail::make_grid(config);
    std::vector<detail::PointContext> contexts;
    contexts.reserve(grid.size());
    for (const auto &gp : grid) contexts.push_back(detail::make_point_context(config, gp));

    const std::size_t items = contexts.size() * static_cast<std::size_t>(config.trials);
    std::vector<std::vector<TrialResult>> buckets(items);
    auto run_item = [&](std::size_t i) {
        const std::size_t point = i / static_cast<std::size_t>(config.trials);
        const int trial = static_cast<int>(i % static_cast<std::size_t>(config.trials));
        buckets[i] = detail::run_trial(config, contexts[point], trial);
    };

    const int workers = std::min<int>(config.workers, static_cast<int>(std::max<std::size_t>(items, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < items; ++i) run_item(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < items; i = next.fetch_add(1))
                    run_item(i);
            });
        for (auto &t : pool) t.join();
    }

    std::vector<TrialResult> results;
    for (auto &bucket : buckets)
        results.insert(results.end(), bucket.begin(), bucket.end());
    // buckets are already in canonical order; keep the guarantee explicit
    std::stable_sort(results.begin(), results.end(),
                     [](const TrialResult &a, const TrialResult &b) {
                         if (a.point_index != b.point_index) return a.point_index < b.point_index;
                         if (a.trial != b.trial) return a.trial < b.trial;
                         return estimator_name(a.estimator) < estimator_name(b.estimator);
                     });
    return results;
}

inline std::vector<AggregateRow> aggregate_results(const std::vector<TrialResult> &results) {
    std::vector<AggregateRow> rows;
    for (const auto &r : results) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow &a) {
            return a.point_index == r.point_index && a.estimator == r.estimator;
        });
        if (it == rows.end()) {
            rows.push_back({r.point_index, r.point, r.estimator, 0.0, 0, 0});
            it = rows.end() - 1;
        }
        if (std::isnan(r.nmse)) {
            ++it->failures;
        } else {
            // streaming arithmetic mean of the non-failed rows
            ++it->trials;
            it->mean_nmse += (r.nmse - it->mean_nmse) / static_cast<double>(it->trials);
        }
    }
    for (auto &row : rows)
        if (row.trials == 0) row.mean_nmse = std::numeric_limits<double>::quiet_NaN();
    std::sort(rows.begin(), rows.end(), [](const AggregateRow &a, const AggregateRow &b) {
        if (a.point_index != b.point_index) return a.point_index < b.point_index;
        return estimator_name(a.estimator) < estimator_name(b.estimator);
    });
    return rows;
}

// the aggregate file sits next to the raw file: out.csv -> out.agg.csv
inline std::string aggregate_path_for(const std::string &raw_path) {
    const std::size_t dot = raw_path.find_last_of('.');
    const std::size_t slash = raw_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return raw_path + ".agg";
    return raw_path.substr(0, dot) + ".agg" + raw_path.substr(dot);
}

inline void write_csv(const std::vector<TrialResult> &results,
                      const std::vector<AggregateRow> &aggregates,
                      const std::string &path, Scenario scenario) {
    const std::string scenario_name = to_string(scenario);
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
        out << "scenario,point,estimator,trial,nmse,converged,iterations,wall_time_s\n";
        for (const auto &r : results)
            out << scenario_name << ',' << detail::format_g9(r.point) << ','
                << estimator_name(r.estimator) << ',' << r.trial << ','
                << detail::format_g9(r.nmse) << ',' << (r.converged ? "true" : "false")
                << ',' << r.iterations << ',' << detail::format_g9(r.wall_time_s) << '\n';
        if (!out) throw std::runtime_error("write_csv: short write to '" + path + "'");
    }
    const std::string agg_path = aggregate_path_for(path);
    std::ofstream out(agg_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + agg_path + "'");
    out << "scenario,point,estimator,mean_nmse,mean_nmse_db,trials,failures\n";
    for (const auto &a : aggregates) {
        const double db = 10.0 * std::log10(a.mean_nmse);
        out << scenario_name << ',' << detail::format_g9(a.point) << ','
            << estimator_name(a.estimator) << ',' << detail::format_g9(a.mean_nmse) << ','
            << detail::format_g9(db) << ',' << a.trials << ',' << a.failures << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: short write to '" + agg_path + "'");
}

namespace detail {

inline std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_list(const std::string &value) {
    std::vector<std::string> parts;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

inline double parse_double(const std::string &value) {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters in number");
    return v;
}

inline long long parse_integer(const std::string &value) {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters in integer");
    return v;
}

inline bool parse_bool(const std::string &value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("expected true/false");
}

inline void apply_config_entry(ExperimentConfig &config, const std::string &key,
                               const std::string &value) {
    if (key == "scenario") {
        config.scenario = parse_scenario(value);
    } else if (key == "snr_grid_db") {
        config.snr_grid_db.clear();
        for (const auto &item : split_list(value))
            config.snr_grid_db.push_back(parse_double(item));
    } else if (key == "pilot_grid") {
        config.pilot_grid.clear();
        for (const auto &item : split_list(value))
            config.pilot_grid.push_back(static_cast<int>(parse_integer(item)));
    } else if (key == "trials") {
        config.trials = static_cast<int>(parse_integer(value));
    } else if (key == "master_seed") {
        config.master_seed = static_cast<std::uint64_t>(parse_integer(value));
    } else if (key == "estimators") {
        config.estimators.clear();
        for (const auto &item : split_list(value))
            config.estimators.push_back(parse_estimator(item));
    } else if (key == "N") {
        config.N = static_cast<int>(parse_integer(value));
    } else if (key == "L") {
        config.L = static_cast<int>(parse_integer(value));
    } else if (key == "kappa") {
        config.kappa = parse_double(value);
    } else if (key == "output_path") {
        config.output_path = value;
    } else if (key == "workers") {
        config.workers = static_cast<int>(parse_integer(value));
    } else if (key == "timings") {
        config.timings = parse_bool(value);
    } else if (key == "rwf_design_snr_db") {
        config.rwf_design_snr_db = parse_double(value);
    } else if (key == "channel.mean_paths") {
        config.channel.mean_paths = parse_double(value);
    } else if (key == "channel.tau_max") {
        config.channel.tau_max = parse_double(value);
    } else if (key == "channel.decay") {
        config.channel.decay = parse_double(value);
    } else if (key == "channel.sampling_time") {
        config.channel.sampling_time = parse_double(value);
    } else {
        throw std::invalid_argument("unknown key '" + key + "'");
    }
}

} // namespace detail

// plain-text configuration: one `key = value` per line, `#` comments,
// comma-separated lists; keys match the ExperimentConfig field names
inline ExperimentConfig read_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    ExperimentConfig config;
    bool channel_touched = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config " + path + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            detail::apply_config_entry(config, key, value);
        } catch (const std::exception &err) {
            throw std::invalid_argument("config " + path + ":" + std::to_string(line_no) +
                                        ": " + err.what());
        }
        if (key.rfind("channel.", 0) == 0) channel_touched = true;
    }
    if (channel_touched)
        config.channel.power_scale = compute_power_scale(
            config.channel.mean_paths, config.channel.tau_max, config.channel.decay);
    return config;
}

} // namespace sbce

#endif // SBCE_HARNESS_HPP
