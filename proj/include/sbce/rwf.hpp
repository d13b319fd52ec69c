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

#ifndef SBCE_RWF_HPP
#define SBCE_RWF_HPP

#include <sbce/vmp.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace sbce {

// Frequency correlation of a channel with uniform power-delay profile on
// [0, tau_max]:  R(f, f') = (1 - exp(-j 2 pi df tau_max)) / (j 2 pi df tau_max)
// with df = f - f'; R = 1 on the diagonal.
inline std::complex<double> rwf_correlation(double f1, double f2, double tau_max) {
    const double x = 2.0 * std::numbers::pi * (f1 - f2) * tau_max;
    if (std::abs(x) < 1e-9) return {1.0, -0.5 * x};
    const std::complex<double> jx(0.0, x);
    return (1.0 - std::exp(-jx)) / jx;
}

// Robustly designed Wiener filter: LMMSE interpolation of the channel over
// all N subcarriers from the pilot observations, assuming the uniform
// power-delay profile (rather than the true one) and a design SNR.
// An infinite design SNR drops the diagonal loading entirely.
inline EstimateReport estimate_rwf(const Eigen::VectorXcd &y, const PilotPattern &pattern,
                                   int num_subcarriers, double design_snr, double tau_max) {
    pattern.validate();
    if (num_subcarriers != pattern.num_subcarriers)
        throw std::invalid_argument("estimate_rwf: subcarrier count disagrees with the pattern");
    if (y.size() != pattern.num_pilots())
        throw std::invalid_argument("estimate_rwf: observation length mismatch");
    if (!(design_snr > 0.0))
        throw std::invalid_argument("estimate_rwf: design_snr must be positive");
    if (!(tau_max > 0.0) || !std::isfinite(tau_max))
        throw std::invalid_argument("estimate_rwf: tau_max must be finite and positive");

    const int m = pattern.num_pilots();
    Eigen::MatrixXcd r_pp(m, m);
    for (int i = 0; i < m; ++i) {
        const double fi = pattern.frequency_of(pattern.pilot_indices[i]);
        for (int j = 0; j < m; ++j)
            r_pp(i, j) =
                rwf_correlation(fi, pattern.frequency_of(pattern.pilot_indices[j]), tau_max);
    }
    if (std::isfinite(design_snr)) r_pp.diagonal().array() += 1.0 / design_snr;

    Eigen::LLT<Eigen::MatrixXcd> llt(r_pp);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("estimate_rwf: regularized pilot covariance is not positive "
                                 "definite");
    const Eigen::VectorXcd z = llt.solve(y);

    EstimateReport report;
    report.h_hat.resize(num_subcarriers);
    for (int n = 0; n < num_subcarriers; ++n) {
        const double fn = pattern.frequency_of(n + 1);
        std::complex<double> acc(0.0, 0.0);
        for (int j = 0; j < m; ++j)
            acc += rwf_correlation(fn, pattern.frequency_of(pattern.pilot_indices[j]), tau_max) *
                   z(j);
        report.h_hat(n) = acc;
    }
    report.alpha_hat.resize(0); // no dictionary coefficients in this estimator
    report.iterations_used = 1;
    report.converged = true;
    report.lambda_hat = design_snr;
    return report;
}

} // namespace sbce

#endif // SBCE_RWF_HPP
