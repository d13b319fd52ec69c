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

#ifndef SBCE_VMP_HPP
#define SBCE_VMP_HPP

#include <sbce/dictionary.hpp>
#include <sbce/model.hpp>
#include <sbce/specfun.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace sbce {

// Variational posterior over (alpha, gamma, eta, lambda), factorized per
// component.  All vectors have one entry per dictionary column; pruned
// components keep their slot (alpha_mean = 0) but are excluded from updates.
struct PosteriorState {
    Eigen::VectorXcd alpha_mean;
    Eigen::MatrixXcd alpha_cov;     // full covariance; empty unless requested
    Eigen::VectorXd alpha_cov_diag; // diagonal of the covariance, always kept
    Eigen::VectorXd gamma_inv_mean;
    Eigen::VectorXd gamma_mean;
    Eigen::VectorXd eta_mean;
    double lambda_mean = 0.0;
    std::vector<bool> active;

    // tr(Phi Sigma Phi^H) for the stored alpha statistics, maintained by
    // update_alpha; the expected-residual term of the lambda update needs it
    // after gamma has already moved on.
    double trace_phi_cov_phih = 0.0;

    int size() const { return static_cast<int>(active.size()); }

    int num_active() const {
        int n = 0;
        for (bool a : active) n += a ? 1 : 0;
        return n;
    }
};

struct EstimateReport {
    Eigen::VectorXcd alpha_hat;
    Eigen::VectorXcd h_hat;
    int iterations_used = 0;
    bool converged = false;
    std::vector<double> residual_history; // per-iteration relative change
    double lambda_hat = 0.0;
};

// Cap applied to the noise-precision mean on (near-)exact fits; with the
// improper default prior (c = d = 0) a zero residual would otherwise diverge.
inline constexpr double kLambdaCap = 1e12;

namespace detail {

inline std::vector<int> active_indices(const std::vector<bool> &active) {
    std::vector<int> idx;
    idx.reserve(active.size());
    for (std::size_t l = 0; l < active.size(); ++l)
        if (active[l]) idx.push_back(static_cast<int>(l));
    return idx;
}

// Hermitian PD factorization with a single mean-diagonal jitter retry.
inline Eigen::LLT<Eigen::MatrixXcd> robust_llt(Eigen::MatrixXcd h, const char *who) {
    Eigen::LLT<Eigen::MatrixXcd> llt(h);
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-10 * h.diagonal().real().sum() / static_cast<double>(h.rows());
        h.diagonal().array() += jitter;
        llt.compute(h);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error(std::string(who) +
                                     ": Hermitian factorization failed even with jitter");
    }
    return llt;
}

inline void check_state_dims(const PosteriorState &state, const Dictionary &dict,
                             const Eigen::VectorXcd &y) {
    const Eigen::Index L = dict.matrix.cols();
    if (state.alpha_mean.size() != L || state.gamma_inv_mean.size() != L ||
        state.eta_mean.size() != L || static_cast<Eigen::Index>(state.active.size()) != L)
        throw std::invalid_argument("posterior state does not match the dictionary width");
    if (y.size() != dict.matrix.rows())
        throw std::invalid_argument("observation length does not match the dictionary rows");
}

} // namespace detail

// Initial posterior: noise precision from the sample variance of y, uniform
// 1/L variance moments, eta from the fixed two-layer value or one hyperprior
// update evaluated at gamma_mean = L.
inline PosteriorState vmp_init(const Eigen::VectorXcd &y, int num_columns,
                               const EstimatorConfig &config) {
    if (y.size() < 1 || num_columns < 1)
        throw std::invalid_argument("vmp_init: need at least one observation and one column");
    config.validate(static_cast<std::size_t>(num_columns));
    const double sample_variance = y.squaredNorm() / static_cast<double>(y.size());
    if (!(sample_variance > 0.0))
        throw std::invalid_argument("vmp_init: observation has zero sample variance");

    PosteriorState state;
    state.alpha_mean = Eigen::VectorXcd::Zero(num_columns);
    state.alpha_cov_diag = Eigen::VectorXd::Zero(num_columns);
    state.gamma_inv_mean = Eigen::VectorXd::Constant(num_columns, 1.0 / num_columns);
    state.gamma_mean = Eigen::VectorXd::Constant(num_columns, static_cast<double>(num_columns));
    state.lambda_mean = 1.0 / sample_variance;
    state.active.assign(num_columns, true);
    state.eta_mean.resize(num_columns);
    if (config.three_layer_active()) {
        for (int l = 0; l < num_columns; ++l)
            state.eta_mean(l) =
                (config.epsilon + config.a[l]) / (state.gamma_mean(l) + config.b[l]);
    } else {
        state.eta_mean.setConstant(*config.eta_fixed);
    }
    return state;
}

// Gaussian update of q(alpha) on the active set:
//   Sigma = (<lambda> Phi^H Phi + V)^{-1},  alpha = <lambda> Sigma Phi^H y,
// with V = diag(<1/gamma_l>).  Two equivalent evaluations are used:
//
//  - direct: factorize the L_a x L_a precision (also yields the full
//    covariance when requested);
//  - dual:   factorize W = I/lambda + Phi V^{-1} Phi^H (M x M) when the
//    active set is wider than the observation, with
//      alpha    = V^{-1} Phi^H W^{-1} y            (exact identity)
//      Sigma_ll = D_ll - D_ll^2 ||L_W^{-1} phi_l||^2,  D = V^{-1}.
//
// The diagonal is clamped to its algebraic bounds
// [1/(lambda ||phi_l||^2 + v_l), 1/v_l] as a final safeguard.
inline PosteriorState update_alpha(const PosteriorState &state, const Dictionary &dict,
                                   const Eigen::VectorXcd &y, bool want_full_cov = false) {
    detail::check_state_dims(state, dict, y);
    if (!(state.lambda_mean > 0.0))
        throw std::invalid_argument("update_alpha: lambda_mean must be positive");
    const Eigen::MatrixXcd &phi = dict.matrix;
    const int L = static_cast<int>(phi.cols());
    const int M = static_cast<int>(phi.rows());
    const double lambda = state.lambda_mean;

    PosteriorState next = state;
    next.alpha_mean.setZero(L);
    next.alpha_cov_diag.setZero(L);
    next.alpha_cov.resize(0, 0);
    next.trace_phi_cov_phih = 0.0;

    const std::vector<int> idx = detail::active_indices(state.active);
    const int n = static_cast<int>(idx.size());
    if (n == 0) return next;

    Eigen::MatrixXcd phi_a(M, n);
    Eigen::VectorXd v_a(n);
    for (int j = 0; j < n; ++j) {
        phi_a.col(j) = phi.col(idx[j]);
        v_a(j) = state.gamma_inv_mean(idx[j]);
        if (!(v_a(j) > 0.0))
            throw std::invalid_argument("update_alpha: active <1/gamma> must be positive");
    }

    Eigen::VectorXcd alpha_a(n);
    Eigen::VectorXd diag_a(n);

    if (!want_full_cov && n > M) {
        const Eigen::VectorXd d = v_a.cwiseInverse();
        Eigen::MatrixXcd w = phi_a * d.asDiagonal() * phi_a.adjoint();
        w.diagonal().array() += 1.0 / lambda;
        const auto llt = detail::robust_llt(std::move(w), "update_alpha");
        alpha_a = d.asDiagonal() * (phi_a.adjoint() * llt.solve(y));
        const Eigen::MatrixXcd s = llt.matrixL().solve(phi_a);
        for (int j = 0; j < n; ++j)
            diag_a(j) = d(j) - d(j) * d(j) * s.col(j).squaredNorm();
    } else {
        Eigen::MatrixXcd h = lambda * (phi_a.adjoint() * phi_a);
        h.diagonal() += v_a.cast<std::complex<double>>();
        const auto llt = detail::robust_llt(std::move(h), "update_alpha");
        alpha_a = lambda * llt.solve(phi_a.adjoint() * y);
        if (want_full_cov) {
            const Eigen::MatrixXcd sigma = llt.solve(Eigen::MatrixXcd::Identity(n, n));
            diag_a = sigma.diagonal().real();
            next.alpha_cov = Eigen::MatrixXcd::Zero(L, L);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) next.alpha_cov(idx[i], idx[j]) = sigma(i, j);
        } else {
            const Eigen::MatrixXcd x =
                llt.matrixL().solve(Eigen::MatrixXcd::Identity(n, n));
            for (int j = 0; j < n; ++j) diag_a(j) = x.col(j).squaredNorm();
        }
    }

    double trace = 0.0;
    for (int j = 0; j < n; ++j) {
        const double lower = 1.0 / (lambda * phi_a.col(j).squaredNorm() + v_a(j));
        const double upper = 1.0 / v_a(j);
        diag_a(j) = std::min(std::max(diag_a(j), lower), upper);
        next.alpha_mean(idx[j]) = alpha_a(j);
        next.alpha_cov_diag(idx[j]) = diag_a(j);
        trace += v_a(j) * diag_a(j);
    }
    // tr(Phi Sigma Phi^H) = tr(G Sigma) = (n_active - sum_l v_l Sigma_ll)/lambda,
    // from Sigma (lambda G + V) = I
    next.trace_phi_cov_phih = std::max(0.0, (n - trace) / lambda);
    return next;
}

// GIG moments of q(gamma_l) with order epsilon - 1, rate <eta_l> and inverse
// rate <|alpha_l|^2> = |alpha_l|^2 + Sigma_ll.  Components whose <1/gamma_l>
// exceeds the prune threshold, or whose GIG degenerates, are deactivated.
inline PosteriorState update_gamma(const PosteriorState &state, const EstimatorConfig &config) {
    config.validate(state.active.size());
    PosteriorState next = state;
    for (int l = 0; l < state.size(); ++l) {
        if (!state.active[l]) continue;
        const double second_moment =
            std::norm(state.alpha_mean(l)) + state.alpha_cov_diag(l);
        const GigParams params{config.epsilon - 1.0, state.eta_mean(l), second_moment};
        try {
            next.gamma_inv_mean(l) = gig_moment(params, -1.0);
            next.gamma_mean(l) = gig_moment(params, 1.0);
        } catch (const component_collapse &) {
            next.active[l] = false;
            next.alpha_mean(l) = 0.0;
            next.alpha_cov_diag(l) = 0.0;
            continue;
        }
        if (next.gamma_inv_mean(l) > config.prune_threshold) {
            next.active[l] = false;
            next.alpha_mean(l) = 0.0;
            next.alpha_cov_diag(l) = 0.0;
        }
    }
    return next;
}

// <eta_l> = (epsilon + a_l)/(<gamma_l> + b_l); no-op for the two-layer model.
inline PosteriorState update_eta(const PosteriorState &state, const EstimatorConfig &config) {
    config.validate(state.active.size());
    if (!config.three_layer_active()) return state;
    PosteriorState next = state;
    for (int l = 0; l < state.size(); ++l) {
        if (!state.active[l]) continue;
        next.eta_mean(l) = (config.epsilon + config.a[l]) / (state.gamma_mean(l) + config.b[l]);
    }
    return next;
}

// <lambda> = (M + c)/(E + d) with E = ||y - Phi alpha||^2 + tr(Phi Sigma Phi^H),
// capped on (near-)exact fits.
inline PosteriorState update_lambda(const PosteriorState &state, const Dictionary &dict,
                                    const Eigen::VectorXcd &y, const EstimatorConfig &config) {
    detail::check_state_dims(state, dict, y);
    config.validate(state.active.size());
    const double residual = (y - dict.matrix * state.alpha_mean).squaredNorm();
    const double e = residual + state.trace_phi_cov_phih;
    PosteriorState next = state;
    const double denom = e + config.d;
    const double numer = static_cast<double>(y.size()) + config.c;
    next.lambda_mean = denom > 0.0 ? std::min(numer / denom, kLambdaCap) : kLambdaCap;
    return next;
}

// Full variational cycle alpha -> gamma -> eta -> lambda until the relative
// change of the coefficient mean drops below tol.  Non-convergence within
// max_iters is reported, not thrown.
inline EstimateReport run_vmp(const Eigen::VectorXcd &y, const Dictionary &dict_pilots,
                              const Dictionary &dict_full, const EstimatorConfig &config) {
    if (dict_pilots.matrix.cols() != dict_full.matrix.cols())
        throw std::invalid_argument("run_vmp: pilot and full dictionaries differ in width");
    if (y.size() != dict_pilots.matrix.rows())
        throw std::invalid_argument("run_vmp: observation length mismatch");
    const int L = static_cast<int>(dict_pilots.matrix.cols());
    config.validate(static_cast<std::size_t>(L));

    EstimateReport report;
    if (y.squaredNorm() == 0.0) {
        report.alpha_hat = Eigen::VectorXcd::Zero(L);
        report.h_hat = Eigen::VectorXcd::Zero(dict_full.matrix.rows());
        report.converged = true;
        return report;
    }

    PosteriorState state = vmp_init(y, L, config);
    Eigen::VectorXcd alpha_prev = state.alpha_mean;
    for (int it = 1; it <= config.max_iters; ++it) {
        state = update_alpha(state, dict_pilots, y);
        state = update_gamma(state, config);
        if (config.three_layer_active()) state = update_eta(state, config);
        state = update_lambda(state, dict_pilots, y, config);

        const double change = (state.alpha_mean - alpha_prev).norm() /
                              std::max(alpha_prev.norm(), 1e-12);
        report.residual_history.push_back(change);
        report.iterations_used = it;
        alpha_prev = state.alpha_mean;
        if (change < config.tol) {
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

#endif // SBCE_VMP_HPP
