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

#ifndef SBCE_DICTIONARY_HPP
#define SBCE_DICTIONARY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sbce {

// Pilot subcarrier selection.  Indices are 1-based over {1..N}; the frequency
// of subcarrier n is (n-1) * subcarrier_spacing, i.e. relative to the first
// subcarrier.  Only frequency-delay products enter the dictionary, so the
// origin is a pure phase convention, fixed here for reproducibility.
struct PilotPattern {
    int num_subcarriers = 0;
    std::vector<int> pilot_indices; // 1-based, strictly increasing
    double subcarrier_spacing = 15e3;

    int num_pilots() const { return static_cast<int>(pilot_indices.size()); }

    double frequency_of(int index) const { return (index - 1) * subcarrier_spacing; }

    void validate() const {
        if (num_subcarriers <= 0)
            throw std::invalid_argument("PilotPattern: num_subcarriers must be positive");
        if (pilot_indices.empty() ||
            pilot_indices.size() > static_cast<std::size_t>(num_subcarriers))
            throw std::invalid_argument("PilotPattern: need 1..N pilot indices");
        if (!(subcarrier_spacing > 0.0))
            throw std::invalid_argument("PilotPattern: subcarrier_spacing must be positive");
        int prev = 0;
        for (int idx : pilot_indices) {
            if (idx <= prev || idx > num_subcarriers)
                throw std::invalid_argument(
                    "PilotPattern: indices must be strictly increasing within {1..N}");
            prev = idx;
        }
    }
};

// Uniform grid of candidate path delays covering [0, tau_max].
struct DelayGrid {
    std::vector<double> delays;
    double resolution = 0.0;
    double tau_max = 0.0;

    int size() const { return static_cast<int>(delays.size()); }
};

enum class DictionaryRows { pilots_only, all_subcarriers };

// Fourier dictionary: entry (m, k) = exp(-j 2 pi f_m tau_k) with f_m over the
// selected rows and tau_k over the delay grid.
struct Dictionary {
    Eigen::MatrixXcd matrix;
    DelayGrid grid;
    PilotPattern pattern;
    DictionaryRows rows = DictionaryRows::pilots_only;
};

inline DelayGrid build_delay_grid(double tau_max, int num_points) {
    if (!(tau_max > 0.0) || !std::isfinite(tau_max))
        throw std::invalid_argument("build_delay_grid: tau_max must be finite and positive");
    if (num_points < 2) throw std::invalid_argument("build_delay_grid: need at least 2 points");
    DelayGrid grid;
    grid.tau_max = tau_max;
    grid.resolution = tau_max / (num_points - 1);
    grid.delays.resize(num_points);
    for (int i = 0; i < num_points; ++i)
        grid.delays[i] = tau_max * i / (num_points - 1);
    return grid;
}

// M indices over {1..N} with the largest uniform integer stride, starting at
// subcarrier 1: stride = floor(N/M).
inline PilotPattern equispaced_pilots(int num_subcarriers, int num_pilots,
                                      double subcarrier_spacing = 15e3) {
    if (num_subcarriers < 1 || num_pilots < 1 || num_pilots > num_subcarriers)
        throw std::invalid_argument("equispaced_pilots: need 1 <= M <= N");
    PilotPattern pattern;
    pattern.num_subcarriers = num_subcarriers;
    pattern.subcarrier_spacing = subcarrier_spacing;
    const int stride = num_subcarriers / num_pilots;
    pattern.pilot_indices.resize(num_pilots);
    for (int m = 0; m < num_pilots; ++m)
        pattern.pilot_indices[m] = 1 + m * stride;
    pattern.validate();
    return pattern;
}

inline Dictionary build_dictionary(const PilotPattern &pattern, const DelayGrid &grid,
                                   DictionaryRows rows) {
    pattern.validate();
    if (grid.size() < 2) throw std::invalid_argument("build_dictionary: invalid delay grid");
    const int num_rows =
        rows == DictionaryRows::pilots_only ? pattern.num_pilots() : pattern.num_subcarriers;
    Dictionary dict;
    dict.grid = grid;
    dict.pattern = pattern;
    dict.rows = rows;
    dict.matrix.resize(num_rows, grid.size());
    for (int m = 0; m < num_rows; ++m) {
        const int subcarrier =
            rows == DictionaryRows::pilots_only ? pattern.pilot_indices[m] : m + 1;
        const double f = pattern.frequency_of(subcarrier);
        for (int k = 0; k < grid.size(); ++k)
            dict.matrix(m, k) =
                std::polar(1.0, -2.0 * std::numbers::pi * f * grid.delays[k]);
    }
    return dict;
}

} // namespace sbce

#endif // SBCE_DICTIONARY_HPP
