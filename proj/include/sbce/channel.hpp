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

#ifndef SBCE_CHANNEL_HPP
#define SBCE_CHANNEL_HPP

#include <sbce/dictionary.hpp>
#include <sbce/rng.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbce {

// Closed-form power normalization: with K ~ Poisson(mean_paths), delays
// uniform on [0, tau_max] and per-path gain variance u * exp(-delay/decay),
// the expected total gain power is mean_paths * u * (decay/tau_max) *
// (1 - exp(-tau_max/decay)); u is chosen to make it 1.
inline double compute_power_scale(double mean_paths, double tau_max, double decay) {
    if (!(mean_paths > 0.0) || !(tau_max > 0.0) || !(decay > 0.0))
        throw std::invalid_argument("compute_power_scale: all parameters must be positive");
    return 1.0 / (mean_paths * (decay / tau_max) * -std::expm1(-tau_max / decay));
}

struct ChannelParams {
    double mean_paths = 10.0;
    double tau_max = 0.0;        // seconds
    double decay = 0.0;          // seconds
    double power_scale = 0.0;    // derived from the other three
    double sampling_time = 0.0;  // seconds

    // Standard setup: T_s = 32.55 ns, tau_max = 144 T_s, decay = 20 T_s,
    // mean path count 10, unit expected total power.
    static ChannelParams defaults() {
        ChannelParams p;
        p.sampling_time = 32.55e-9;
        p.tau_max = 144.0 * p.sampling_time;
        p.decay = 20.0 * p.sampling_time;
        p.mean_paths = 10.0;
        p.power_scale = compute_power_scale(p.mean_paths, p.tau_max, p.decay);
        return p;
    }

    void validate() const {
        if (!(mean_paths > 0.0) || !(tau_max > 0.0) || !(decay > 0.0) || !(power_scale > 0.0) ||
            !(sampling_time > 0.0))
            throw std::invalid_argument("ChannelParams: all fields must be positive");
    }
};

struct ChannelRealization {
    int num_paths = 0;
    std::vector<double> delays;               // seconds, within [0, tau_max]
    std::vector<std::complex<double>> gains;
};

struct Observation {
    Eigen::VectorXcd y;
    double noise_precision_true = 0.0;
    PilotPattern pattern;
};

inline ChannelRealization sample_channel(RandomStream &rng, const ChannelParams &params) {
    params.validate();
    ChannelRealization ch;
    ch.num_paths = rng.poisson(params.mean_paths);
    ch.delays.resize(ch.num_paths);
    ch.gains.resize(ch.num_paths);
    for (int k = 0; k < ch.num_paths; ++k) {
        ch.delays[k] = params.tau_max * rng.uniform();
        const double variance = params.power_scale * std::exp(-ch.delays[k] / params.decay);
        ch.gains[k] = rng.circular_normal(variance);
    }
    return ch;
}

// h(f) = sum_k gain_k exp(-j 2 pi f delay_k) at each requested frequency
inline Eigen::VectorXcd frequency_response(const ChannelRealization &ch,
                                           const std::vector<double> &freqs) {
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(freqs.size()));
    for (std::size_t m = 0; m < freqs.size(); ++m)
        for (int k = 0; k < ch.num_paths; ++k)
            h(static_cast<Eigen::Index>(m)) +=
                ch.gains[k] * std::polar(1.0, -2.0 * std::numbers::pi * freqs[m] * ch.delays[k]);
    return h;
}

inline Eigen::VectorXcd frequency_response(const ChannelRealization &ch,
                                           const PilotPattern &pattern, DictionaryRows rows) {
    pattern.validate();
    std::vector<double> freqs;
    if (rows == DictionaryRows::pilots_only) {
        freqs.reserve(pattern.pilot_indices.size());
        for (int idx : pattern.pilot_indices) freqs.push_back(pattern.frequency_of(idx));
    } else {
        freqs.reserve(pattern.num_subcarriers);
        for (int n = 1; n <= pattern.num_subcarriers; ++n)
            freqs.push_back(pattern.frequency_of(n));
    }
    return frequency_response(ch, freqs);
}

// y = h + w with w i.i.d. circular complex Gaussian of total variance
// 1/noise_precision per component.  noise_precision = +infinity is the exact
// no-noise flag (no variates are consumed).
inline Observation observe_pilots(const Eigen::VectorXcd &h_pilots, double noise_precision,
                                  RandomStream &rng, const PilotPattern &pattern) {
    if (!(noise_precision > 0.0))
        throw std::invalid_argument("observe_pilots: noise_precision must be positive");
    if (h_pilots.size() != pattern.num_pilots())
        throw std::invalid_argument("observe_pilots: h_pilots length must match the pattern");
    Observation obs;
    obs.noise_precision_true = noise_precision;
    obs.pattern = pattern;
    obs.y = h_pilots;
    if (std::isfinite(noise_precision)) {
        const double variance = 1.0 / noise_precision;
        for (Eigen::Index m = 0; m < obs.y.size(); ++m)
            obs.y(m) += rng.circular_normal(variance);
    }
    return obs;
}

// Debug serialization: one row per path, full double precision.
inline void write_channel_csv(const ChannelRealization &ch, std::ostream &out) {
    out << "path,delay_s,gain_re,gain_im\n";
    out.precision(17);
    for (int k = 0; k < ch.num_paths; ++k)
        out << k << ',' << ch.delays[k] << ',' << ch.gains[k].real() << ',' << ch.gains[k].imag()
            << '\n';
}

inline ChannelRealization read_channel_csv(std::istream &in) {
    ChannelRealization ch;
    std::string line;
    if (!std::getline(in, line) || line != "path,delay_s,gain_re,gain_im")
        throw std::runtime_error("read_channel_csv: missing or malformed header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double vals[4];
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(row, field, i < 3 ? ',' : '\n'))
                throw std::runtime_error("read_channel_csv: short row: " + line);
            vals[i] = std::stod(field);
        }
        ch.delays.push_back(vals[1]);
        ch.gains.emplace_back(vals[2], vals[3]);
    }
    ch.num_paths = static_cast<int>(ch.delays.size());
    return ch;
}

} // namespace sbce

#endif // SBCE_CHANNEL_HPP
