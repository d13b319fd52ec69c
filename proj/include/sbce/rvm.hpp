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

#ifndef SBCE_RVM_HPP
#define SBCE_RVM_HPP

#include <sbce/vmp.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace sbce {

struct RvmControls {
    int max_iters = 200;
    double tol = 1e-6;            // relative change of the coefficient mean
    double prune_gamma = 1e-12;   // deactivate below this prior variance
};

// EM-style sparse Bayesian learning with a per-component Gaussian prior
// variance gamma_l: the E-step is the usual Gaussian posterior (shared with
// the variational engine through update_alpha, V = diag(1/gamma_l)), the
// M-step sets gamma_l to the posterior second moment and the noise precision
// to M / expected residual.
inline EstimateReport estimate_rvm(const Eigen::VectorXcd &y, const Dictionary &dict_pilots,
                                   const Dictionary &dict_full,
                                   const RvmControls &controls = {}) {
    if (controls.max_iters < 1 || !(controls.tol > 0.0) || !(controls.prune_gamma > 0.0))
        throw std::invalid_argument("estimate_rvm: invalid controls");
    if (y.size() != dict_pilots.matrix.rows())
        throw std::invalid_argument("estimate_rvm: observation length mismatch");
    if (dict_pilots.matrix.cols() != dict_full.matrix.cols())
        throw std::invalid_argument("estimate_rvm: dictionaries differ in width");

    const int L = static_cast<int>(dict_pilots.matrix.cols());
    const int M = static_cast<int>(y.size());

    EstimateReport report;
    if (y.squaredNorm() == 0.0) {
        report.alpha_hat = Eigen::VectorXcd::Zero(L);
        report.h_hat = Eigen::VectorXcd::Zero(dict_full.matrix.rows());
        report.converged = true;
        return report;
    }

    // posterior container reused for the shared Gaussian update; gamma here
    // is the prior variance, so V = diag(1/gamma)
    PosteriorState state;
    state.alpha_mean = Eigen::VectorXcd::Zero(L);
    state.alpha_cov_diag = Eigen::VectorXd::Zero(L);
    state.gamma_mean = Eigen::VectorXd::Constant(L, static_cast<double>(L));
    state.gamma_inv_mean = state.gamma_mean.cwiseInverse();
    state.eta_mean = Eigen::VectorXd::Ones(L); // unused by the Gaussian step
    state.lambda_mean = static_cast<double>(M) / y.squaredNorm();
    state.active.assign(L, true);

    Eigen::VectorXcd alpha_prev = state.alpha_mean;
    for (int it = 1; it <= controls.max_iters; ++it) {
        state = update_alpha(state, dict_pilots, y);

        for (int l = 0; l < L; ++l) {
            if (!state.active[l]) continue;
            const double second_moment =
                std::norm(state.alpha_mean(l)) + state.alpha_cov_diag(l);
            if (second_moment < controls.prune_gamma) {
                state.active[l] = false;
                state.alpha_mean(l) = 0.0;
                state.alpha_cov_diag(l) = 0.0;
                continue;
            }
            state.gamma_mean(l) = second_moment;
            state.gamma_inv_mean(l) = 1.0 / second_moment;
        }

        const double e =
            (y - dict_pilots.matrix * state.alpha_mean).squaredNorm() + state.trace_phi_cov_phih;
        state.lambda_mean = e > 0.0 ? std::min(static_cast<double>(M) / e, kLambdaCap)
                                    : kLambdaCap;

        const double change = (state.alpha_mean - alpha_prev).norm() /
                              std::max(alpha_prev.norm(), 1e-12);
        report.residual_history.push_back(change);
        report.iterations_used = it;
        alpha_prev = state.alpha_mean;
        if (change < controls.tol) {
            report.converged = true;
            break;
        }
    }

    report.alpha_hat = state.alpha_mean;
    report.h_hat = dict_full.matrix * state.alpha_mean;
    report.lambda_hat = state.lambda_mean;
    return report;
}

} // namespace sbce

#endif // SBCE_RVM_HPP
