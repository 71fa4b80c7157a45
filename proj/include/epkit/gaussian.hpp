// SPDX-License-Identifier: Apache-2.0
//
// Scalar special functions and one-dimensional Gaussian measures.
// Everything here is pure and reentrant.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace epkit {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
// h(c) is indistinguishable from 1 in double precision far before this.
inline constexpr double kHSaturationCut = 40.0;

namespace detail {

// exp(-x*x) with a 26-bit hi/lo split of x so the squared term is exact.
// Plain x*x loses ~x^2*eps of the exponent, which matters in the far tail.
inline double exp_neg_xsq(double x) {
    const double ax = std::fabs(x);
    if (ax >= 38.0) return 0.0;  // exp(-1444) underflows anyway
    const double hi = std::nearbyint(ax * 0x1p21) * 0x1p-21;
    const double lo = ax - hi;
    return std::exp(-hi * hi) * std::exp(-(2.0 * hi + lo) * lo);
}

// erf(x) for |x| < 1.25 via the non-alternating series
//   erf(x) = (2/sqrt(pi)) x e^{-x^2} sum_k (2x^2)^k / (2k+1)!!
// All terms positive, so full relative accuracy with no cancellation.
inline double erf_series(double x) {
    const double x2 = x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= 2.0 * x2 / static_cast<double>(2 * k + 1);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    return (2.0 / kSqrtPi) * x * exp_neg_xsq(x) * sum;
}

// erfc(x) for x >= 1.25 via the Legendre continued fraction for the upper
// incomplete gamma Gamma(1/2, x^2) (modified Lentz iteration):
//   erfc(x) = x e^{-x^2}/sqrt(pi) * 1/(x^2 + 1/2/(1 + 1/(x^2 + 3/2/(1 + ...))))
inline double erfc_cf(double x) {
    const double z = x * x;
    const double tiny = 1e-300;
    double b = z + 0.5;  // b0 = z + 1 - a, a = 1/2
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 400; ++i) {
        const double an = -i * (i - 0.5);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return x * exp_neg_xsq(x) / kSqrtPi * h;
}

}  // namespace detail

/// Complementary error function, relative accuracy ~1e-15 over [-26, 26].
inline double erfc(double x) {
    if (std::isnan(x)) return x;
    if (std::isinf(x)) return x > 0.0 ? 0.0 : 2.0;
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x < 1.25) return 1.0 - detail::erf_series(x);
    return detail::erfc_cf(x);
}

inline double erf(double x) {
    if (std::fabs(x) < 1.25) return detail::erf_series(x);
    return x > 0.0 ? 1.0 - detail::erfc_cf(x) : detail::erfc_cf(-x) - 1.0;
}

/// Gaussian Q-function, Q(x) = (1/2) erfc(x/sqrt(2)).
inline double q_function(double x) { return 0.5 * erfc(x * kInvSqrt2); }

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * erfc(-x * kInvSqrt2); }

/// Interval on the extended real line, lo <= hi, +-inf allowed.
struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi)
            throw std::domain_error("Interval: require lo <= hi");
    }
    static Interval whole_line() {
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }
};

/// Standard Gaussian measure of an interval, clamped into [0, 1].
inline double gaussian_measure(const Interval& iv) {
    // Phi(hi) - Phi(lo) written as Q(lo) - Q(hi); each side keeps full
    // relative accuracy in its own tail.
    const double m = q_function(iv.lo) - q_function(iv.hi);
    if (m < 0.0) return 0.0;
    if (m > 1.0) return 1.0;
    return m;
}

/// mu([-c, c]) for c >= 0; saturates to exactly 1 above the documented cutoff.
inline double h_of(double c) {
    if (c > kHSaturationCut) return 1.0;
    return erf(c * kInvSqrt2);
}

/// 1 - h(c) = erfc(c/sqrt(2)), accurate in the tail where h rounds to 1.
inline double one_minus_h(double c) { return erfc(c * kInvSqrt2); }

/// The pair g = mu([-c, inf)), h = mu([-c, c]); g = (h+1)/2 is enforced
/// as an identity, not recomputed.
struct GhPair {
    double g;
    double h;
    double c;
};

inline GhPair gh_at(double c) {
    if (!(c > 0.0)) throw std::domain_error("gh_at: require c > 0");
    const double h = h_of(c);
    return {0.5 * (h + 1.0), h, c};
}

/// h'(c) = sqrt(2/pi) e^{-c^2/2} and h''(c) = -c h'(c).
struct HDerivatives {
    double first;
    double second;
};

inline HDerivatives h_derivatives(double c) {
    if (!(c > 0.0)) throw std::domain_error("h_derivatives: require c > 0");
    const double hp = std::sqrt(2.0 / kPi) * detail::exp_neg_xsq(c * kInvSqrt2);
    return {hp, -c * hp};
}

}  // namespace epkit
