// SPDX-License-Identifier: Apache-2.0
//
// Closed-form and quadrature-based error probabilities for specific
// modulations: exact square M-QAM BEP, M-PSK SEP, the 4-point parity-check
// BPSK constellation, and the Rayleigh-averaged BPSK closed form used as a
// fading oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "epkit/gaussian.hpp"
#include "epkit/quadrature.hpp"

namespace epkit {

/// Square QAM only: M = 4^j so that sqrt(M) and log2(M) are integral.
struct QamSpec {
    int M;

    explicit QamSpec(int m) : M(m) {
        int v = M;
        while (v > 1 && v % 4 == 0) v /= 4;
        if (M < 4 || v != 1)
            throw std::domain_error("QamSpec: M must be 4^j for integer j >= 1");
    }
    int sqrt_m() const { return static_cast<int>(std::lround(std::sqrt(double(M)))); }
    int bits_per_symbol() const { return static_cast<int>(std::lround(std::log2(double(M)))); }
};

struct PskSpec {
    int M;
    explicit PskSpec(int m) : M(m) {
        if (M < 2) throw std::domain_error("PskSpec: require M >= 2");
    }
};

/// Exact instantaneous BEP of Gray-coded square M-QAM at symbol SNR gamma:
/// the double sum over k = 1..log2 sqrt(M), i = 0..(1-2^-k) sqrt(M) - 1 with
/// sign (-1)^floor(i 2^{k-1}/sqrt M), weight 2^{k-1} - floor(i 2^{k-1}/sqrt M
/// + 1/2) and kernel erfc((2i+1) sqrt(3 gamma / (2(M-1)))).
/// Index arithmetic is exact-integer; signed terms are accumulated in
/// descending magnitude order.
inline double qam_bep_exact(const QamSpec& spec, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("qam_bep_exact: require gamma > 0");
    const std::int64_t sm = spec.sqrt_m();
    const int levels = spec.bits_per_symbol() / 2;  // log2 sqrt(M)
    const double base = std::sqrt(3.0 / (2.0 * (spec.M - 1))) * std::sqrt(gamma);
    std::vector<double> terms;
    for (int k = 1; k <= levels; ++k) {
        const std::int64_t pow2 = std::int64_t(1) << (k - 1);
        const std::int64_t imax = ((std::int64_t(1) << k) - 1) * sm / (std::int64_t(1) << k);
        for (std::int64_t i = 0; i < imax; ++i) {
            const std::int64_t fl = (i * pow2) / sm;                    // floor(i 2^{k-1}/sm)
            const std::int64_t flh = (2 * i * pow2 + sm) / (2 * sm);    // floor(... + 1/2)
            const double w = static_cast<double>(pow2 - flh);
            const double sgn = (fl % 2 == 0) ? 1.0 : -1.0;
            terms.push_back(sgn * w * erfc(double(2 * i + 1) * base));
        }
    }
    std::sort(terms.begin(), terms.end(),
              [](double x, double y) { return std::fabs(x) > std::fabs(y); });
    double sum = 0.0, comp = 0.0;
    for (double v : terms) {  // Kahan
        const double y = v - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum * 2.0 / (static_cast<double>(sm) * spec.bits_per_symbol());
}

/// M-PSK SEP at symbol SNR gamma via the polar-form integral
///   (1/pi) int_0^{pi(M-1)/M} exp(-gamma sin^2(pi/M) / sin^2 theta) dtheta.
inline double psk_sep(const PskSpec& spec, double gamma, double abs_tol = 1e-12,
                      std::size_t max_evals = 1000000, QuadratureResult* info = nullptr) {
    if (!(gamma > 0.0)) throw std::domain_error("psk_sep: require gamma > 0");
    const double s2 = std::sin(kPi / spec.M) * std::sin(kPi / spec.M);
    auto f = [&](double th) {
        const double s = std::sin(th);
        return std::exp(-gamma * s2 / (s * s));
    };
    const auto r = integrate(f, 0.0, kPi * (spec.M - 1) / spec.M,
                             std::min(abs_tol, 1e-290), 1e-13, max_evals);
    if (info) *info = {r.value / kPi, r.error_estimate / kPi, r.evaluations};
    return r.value / kPi;
}

/// Error probability of the 4-point constellation from the (3,2) parity-check
/// code with antipodal mapping (even-weight vertices of [-1,1]^3), noise
/// sigma = e^{-t}. With c = sqrt(2) e^t (distance to each decision face) and
/// the complement of the decision cone split into three congruent convex
/// pieces by the half-planes through the 0 / apex axis,
///   p(t) = 3 Q(c) - (3/pi) int_{beta - pi/2}^{pi/2}
///              Q(c sqrt(1+S^2(psi))) / sqrt(1+S^2(psi)) dpsi,
///   S(psi) = 1/(sqrt(3) cos psi),  beta = asin(sqrt(2/3)).
/// The independent check against the equicorrelated-orthant route and the
/// Monte Carlo oracle lives in the tests.
inline double parity_bpsk_ep(double t, double abs_tol = 1e-12,
                             std::size_t max_evals = 1000000,
                             QuadratureResult* info = nullptr) {
    if (!std::isfinite(t)) throw std::domain_error("parity_bpsk_ep: t must be finite");
    const double c = kSqrt2 * std::exp(t);
    const double beta = std::asin(std::sqrt(2.0 / 3.0));
    auto f = [&](double psi) {
        const double cp = std::cos(psi);
        if (cp <= 0.0) return 0.0;
        const double w = std::sqrt(1.0 + 1.0 / (3.0 * cp * cp));
        return q_function(c * w) / w;
    };
    const auto r = integrate(f, beta - 0.5 * kPi, 0.5 * kPi,
                             std::min(abs_tol, 1e-290), 1e-13, max_evals);
    const double p = 3.0 * q_function(c) - 3.0 * r.value / kPi;
    if (info) *info = {p, 3.0 * r.error_estimate / kPi, r.evaluations};
    return p;
}

/// Rayleigh-averaged BPSK BEP, (1/2)(1 - sqrt(gbar/(1+gbar))), written to
/// keep relative accuracy at large gbar.
inline double rayleigh_bpsk_avg(double gamma_bar) {
    if (!(gamma_bar > 0.0))
        throw std::domain_error("rayleigh_bpsk_avg: require gamma_bar > 0");
    const double r = std::sqrt(gamma_bar / (1.0 + gamma_bar));
    return 0.5 / ((1.0 + gamma_bar) * (1.0 + r));
}

}  // namespace epkit
