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

#ifndef SBCE_SPECFUN_HPP
#define SBCE_SPECFUN_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace sbce {

/// Raised when a generalized-inverse-Gaussian factor has degenerated to the
/// point where the requested moment no longer exists (e.g. second-moment
/// input exactly zero with a negative-order moment).  Callers typically
/// respond by pruning the offending component.
class component_collapse : public std::runtime_error {
  public:
    explicit component_collapse(const std::string &what) : std::runtime_error(what) {}
};

namespace detail {

// Taylor coefficients c_k of 1/Gamma(z) = sum_k c_k z^k  (Abramowitz & Stegun 6.1.34),
// so that 1/Gamma(1+mu) = sum_k c_k mu^{k-1}.
inline constexpr double kInvGammaCoeff[27] = {
    0.0, // unused, indexing starts at k = 1
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// Temme's auxiliary gamma terms for |mu| <= 1/2:
//   g1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu)   (finite limit -EulerGamma at mu = 0)
//   g2 = [1/Gamma(1-mu) + 1/Gamma(1+mu)] / 2
// computed from the even/odd split of the series above, which avoids the
// cancellation the direct difference suffers for small mu.
struct TemmeGamma {
    double g1;
    double g2;
    double inv_gamma_1p; // 1/Gamma(1+mu)
    double inv_gamma_1m; // 1/Gamma(1-mu)
};

inline TemmeGamma temme_gamma(double mu) {
    const double mu2 = mu * mu;
    double even = 0.0; // c2 + c4 mu^2 + ...
    double odd = 0.0;  // c1 + c3 mu^2 + ...
    double pw = 1.0;
    for (int k = 1; k <= 25; k += 2) {
        odd += kInvGammaCoeff[k] * pw;
        even += kInvGammaCoeff[k + 1] * pw;
        pw *= mu2;
    }
    TemmeGamma t;
    t.g1 = -even;
    t.g2 = odd;
    t.inv_gamma_1p = t.g2 - mu * t.g1;
    t.inv_gamma_1m = t.g2 + mu * t.g1;
    return t;
}

// Temme's series for K_mu(x), K_{mu+1}(x) with |mu| <= 1/2 and 0 < x <= 2.
// Returns {ln K_mu(x), ln K_{mu+1}(x)}.  The partial sums stay within double
// range for every positive normal x, so only the final 2/x factor is applied
// in the log domain.
inline std::pair<double, double> log_k_pair_series(double mu, double x) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double d = -std::log(0.5 * x); // log(2/x)
    const double e1 = mu * d;
    const double pimu = M_PI * mu;
    const double fact = (std::abs(pimu) < 1e-150) ? 1.0 : pimu / std::sin(pimu);
    const double fact2 = (std::abs(e1) < 1e-150) ? 1.0 : std::sinh(e1) / e1;
    const TemmeGamma tg = temme_gamma(mu);

    double ff = fact * (tg.g1 * std::cosh(e1) + tg.g2 * fact2 * d);
    double sum = ff;
    const double e = std::exp(e1);
    double p = 0.5 * e / tg.inv_gamma_1p;
    double q = 0.5 / (e * tg.inv_gamma_1m);
    double c = 1.0;
    const double x2 = 0.25 * x * x;
    double sum1 = p;
    for (int i = 1; i <= 500; ++i) {
        ff = (i * ff + p + q) / (i * i - mu * mu);
        c *= x2 / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        sum1 += c * (p - i * ff);
        if (std::abs(del) < std::abs(sum) * eps) {
            return {std::log(sum), std::log(sum1) + std::log(2.0 / x)};
        }
    }
    throw std::runtime_error("log_bessel_k: small-argument series failed to converge");
}

// Steed's continued fraction (CF2) for K_mu(x), K_{mu+1}(x) with |mu| <= 1/2
// and x >= 2.  Returns {ln K_mu(x), ln K_{mu+1}(x)}; the exp(-x) factor is
// kept in the log domain so large arguments never underflow.
inline std::pair<double, double> log_k_pair_cf2(double mu, double x) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double mu2 = mu * mu;
    const double a1 = 0.25 - mu2;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    bool converged = false;
    for (int i = 2; i <= 10000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < eps) {
            converged = true;
            break;
        }
    }
    if (!converged) throw std::runtime_error("log_bessel_k: continued fraction failed to converge");
    h = a1 * h;
    const double log_k_mu = 0.5 * std::log(M_PI / (2.0 * x)) - x - std::log(s);
    const double log_k_mu1 = log_k_mu + std::log((mu + x + 0.5 - h) / x);
    return {log_k_mu, log_k_mu1};
}

// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

} // namespace detail

/// ln K_nu(x), the log of the modified Bessel function of the second kind.
///
/// Valid for any finite real order and x > 0; the result never overflows
/// because every large or small factor is carried in the log domain.  Temme's
/// series covers x < 2, Steed's continued fraction covers x >= 2, and the
/// three-term recurrence lifts the order from the seed interval [-1/2, 1/2]
/// entirely in logs.
inline double log_bessel_k(double order, double arg) {
    if (!std::isfinite(order) || !std::isfinite(arg))
        throw std::domain_error("log_bessel_k: non-finite input");
    if (arg <= 0.0) throw std::domain_error("log_bessel_k: argument must be positive");

    const double nu = std::abs(order); // K_{-nu} = K_{nu}
    const int n = static_cast<int>(std::lround(nu));
    const double mu = nu - n; // in [-1/2, 1/2]

    const auto [lk_mu, lk_mu1] =
        (arg < 2.0) ? detail::log_k_pair_series(mu, arg) : detail::log_k_pair_cf2(mu, arg);
    if (n == 0) return lk_mu;

    const double log_x = std::log(arg);
    double prev = lk_mu;
    double cur = lk_mu1;
    for (int j = 1; j < n; ++j) {
        // K_{v+1}(x) = K_{v-1}(x) + (2v/x) K_v(x), all terms positive
        const double lr = std::log(2.0 * (mu + j)) - log_x;
        const double next = cur + detail::log_add_exp(lr, prev - cur);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Parameters of a generalized inverse Gaussian density
///   q(g) ∝ g^{order-1} exp(-rate*g - inverse_rate/g),  g > 0.
struct GigParams {
    double order;        // p
    double rate;         // coefficient of g, > 0
    double inverse_rate; // coefficient of 1/g, >= 0

    void validate() const {
        if (!std::isfinite(order) || !std::isfinite(rate) || !std::isfinite(inverse_rate))
            throw std::domain_error("GigParams: non-finite parameter");
        if (rate <= 0.0) throw std::domain_error("GigParams: rate must be positive");
        if (inverse_rate < 0.0) throw std::domain_error("GigParams: inverse_rate must be non-negative");
    }
};

/// n-th moment <g^n> of the GIG distribution, for any real n:
///   <g^n> = (inverse_rate/rate)^{n/2} K_{p+n}(z) / K_p(z),  z = 2 sqrt(rate*inverse_rate).
///
/// Everything is assembled as exp(of log differences), so near-degenerate
/// components (tiny or huge z) do not overflow intermediate terms.  With
/// inverse_rate = 0 the density degenerates to Gamma(p, rate): moments are
/// returned in closed form when they exist, otherwise component_collapse is
/// thrown and the caller decides about pruning.
inline double gig_moment(const GigParams &params, double n) {
    params.validate();
    if (!std::isfinite(n)) throw std::domain_error("gig_moment: non-finite moment order");
    if (n == 0.0) return 1.0;

    const double p = params.order;
    if (params.inverse_rate == 0.0) {
        if (n > 0.0 && p > 0.0) // Gamma(p, rate): <g^n> = Gamma(p+n)/(Gamma(p) rate^n)
            return std::exp(std::lgamma(p + n) - std::lgamma(p) - n * std::log(params.rate));
        throw component_collapse("gig_moment: degenerate component (inverse_rate = 0)");
    }

    const double half_log_ratio = 0.5 * (std::log(params.inverse_rate) - std::log(params.rate));
    const double z = 2.0 * std::exp(0.5 * (std::log(params.rate) + std::log(params.inverse_rate)));
    const double result =
        std::exp(n * half_log_ratio + log_bessel_k(p + n, z) - log_bessel_k(p, z));
    if (std::isnan(result) || result <= 0.0)
        throw std::runtime_error("gig_moment: evaluation produced an invalid moment");
    return result;
}

} // namespace sbce

#endif // SBCE_SPECFUN_HPP
