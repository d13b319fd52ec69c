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

#ifndef SBCE_QUADRATURE_HPP
#define SBCE_QUADRATURE_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sbce {
namespace detail {

// ln of the integral over [lo, hi] of exp(phi(u)).
//
// Built for well-behaved (smooth, exponentially decaying) log-integrands whose
// scale is unknown a priori: the peak is located by a dense scan plus local
// refinement, the integrand is rescaled by its peak value, and the region
// contributing above exp(-46) of the peak is integrated adaptively.  No
// unimodality is assumed when choosing the window (all scan points above the
// cutoff are bracketed).
template <typename F>
double log_integral_exp(F &&phi, double lo = -700.0, double hi = 700.0) {
    constexpr int n = 14000;
    const double step = (hi - lo) / n;
    std::vector<double> vals(n + 1);
    int best = 0;
    for (int i = 0; i <= n; ++i) {
        vals[i] = phi(lo + i * step);
        if (vals[i] > vals[best]) best = i;
    }
    if (!std::isfinite(vals[best]))
        throw std::runtime_error("log_integral_exp: integrand has no finite maximum on the scan");

    // local zoom around the scan maximum; phi need not be globally concave
    double center = lo + best * step;
    double radius = step;
    double phi_peak = vals[best];
    for (int round = 0; round < 10; ++round) {
        for (int i = 0; i <= 20; ++i) {
            const double u = center - radius + 2.0 * radius * i / 20.0;
            const double v = phi(u);
            if (v > phi_peak) {
                phi_peak = v;
                center = u;
            }
        }
        radius /= 5.0;
    }

    const double cut = phi_peak - 46.0;
    int ilo = best, ihi = best;
    for (int i = 0; i <= n; ++i) {
        if (vals[i] > cut) {
            ilo = std::min(ilo, i);
            ihi = std::max(ihi, i);
        }
    }
    const double wlo = std::max(lo, lo + (ilo - 1) * step);
    const double whi = std::min(hi, lo + (ihi + 1) * step);

    const auto f = [&](double u) {
        const double v = phi(u) - phi_peak;
        return v > -745.0 ? std::exp(v) : 0.0;
    };
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, wlo, whi, 15, 1e-9, &err);
    const double result = phi_peak + std::log(integral);
    if (!std::isfinite(result))
        throw std::runtime_error("log_integral_exp: quadrature failed to produce a finite value");
    return result;
}

} // namespace detail
} // namespace sbce

#endif // SBCE_QUADRATURE_HPP
