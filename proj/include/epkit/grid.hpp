// SPDX-License-Identifier: Apache-2.0
//
// Exact symbol error probability for constellations on a d-dimensional
// regular grid with n points per axis and spacing a, via the region-type
// polynomial H(h) = sum_k P_k ((h+1)/2)^{d-k} h^k.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "epkit/gaussian.hpp"

namespace epkit {

/// Region-type weights (P_0, ..., P_d): P_k is the prior mass of points
/// with exactly k interior coordinates.
struct RegionTypeWeights {
    int d;
    std::vector<double> p_k;  // size d+1

    RegionTypeWeights(int d_, std::vector<double> p)
        : d(d_), p_k(std::move(p)) {
        if (d < 1 || p_k.size() != static_cast<std::size_t>(d) + 1)
            throw std::domain_error("RegionTypeWeights: need d+1 entries");
        double sum = 0.0;
        for (double v : p_k) {
            if (v < 0.0) throw std::domain_error("RegionTypeWeights: negative weight");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::domain_error("RegionTypeWeights: weights must sum to 1");
    }
};

struct GridConstellation {
    int n;       // points per axis, >= 2
    int d;       // dimensions, >= 1
    double a;    // grid spacing, > 0
    std::vector<double> priors;  // size n^d

    GridConstellation(int n_, int d_, double a_, std::vector<double> priors_)
        : n(n_), d(d_), a(a_), priors(std::move(priors_)) {
        if (n < 2 || d < 1 || !(a > 0.0))
            throw std::domain_error("GridConstellation: require n>=2, d>=1, a>0");
        std::uint64_t m = 1;
        for (int i = 0; i < d; ++i) m *= static_cast<std::uint64_t>(n);
        if (priors.size() != m)
            throw std::domain_error("GridConstellation: priors size must be n^d");
        double sum = 0.0;
        for (double p : priors) {
            if (p < 0.0) throw std::domain_error("GridConstellation: negative prior");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::domain_error("GridConstellation: priors must sum to 1");
    }

    static GridConstellation uniform(int n_, int d_, double a_) {
        std::uint64_t m = 1;
        for (int i = 0; i < d_; ++i) m *= static_cast<std::uint64_t>(n_);
        return GridConstellation(n_, d_, a_,
                                 std::vector<double>(m, 1.0 / static_cast<double>(m)));
    }

    std::uint64_t size() const { return priors.size(); }
};

/// SNR bookkeeping for a grid curve: per-dimension SNR s = ((a/2) e^t)^2,
/// so gamma_db = (20/ln 10) t + 20 log10(a/2) is affine in t.
struct SnrPoint {
    double t;
    double a;

    double gamma_db() const {
        return 20.0 / std::log(10.0) * t + 20.0 * std::log10(a / 2.0);
    }
    static SnrPoint from_gamma_db(double db, double a) {
        return {db * std::log(10.0) / 20.0 - std::log(a / 2.0), a};
    }
};

/// Classify every point by its number of interior coordinates (axis index
/// in 2..n-1) and accumulate priors into (P_0, ..., P_d).
inline RegionTypeWeights classify_region_types(const GridConstellation& c) {
    std::vector<double> pk(static_cast<std::size_t>(c.d) + 1, 0.0);
    std::vector<int> idx(c.d, 0);  // 0-based axis indices
    for (std::uint64_t i = 0; i < c.size(); ++i) {
        int interior = 0;
        for (int ax = 0; ax < c.d; ++ax)
            if (idx[ax] > 0 && idx[ax] < c.n - 1) ++interior;
        pk[interior] += c.priors[i];
        for (int ax = 0; ax < c.d; ++ax) {  // mixed-radix increment
            if (++idx[ax] < c.n) break;
            idx[ax] = 0;
        }
    }
    return RegionTypeWeights(c.d, std::move(pk));
}

/// H_k(h) = ((h+1)/2)^{d-k} h^k.
inline double h_poly(int k, double h, int d) {
    if (k < 0 || k > d) throw std::domain_error("h_poly: require 0 <= k <= d");
    if (!(h >= 0.0 && h <= 1.0)) throw std::domain_error("h_poly: require h in [0,1]");
    return std::pow(0.5 * (h + 1.0), d - k) * std::pow(h, k);
}

struct HPolyDerivs {
    double value;
    double first;
    double second;
};

/// Analytic H_k, H_k', H_k''. For h away from 0 the ratio forms
///   H_k' = H_k (hd+k)/(h(h+1)),
///   H_k'' = H_k ((k^2-k) + 2hk(d-1) + h^2 d(d-1)) / (h^2 (h+1)^2)
/// are used; the removable h -> 0 singularity is handled by direct
/// product-rule differentiation below the switch point.
inline HPolyDerivs h_poly_derivs(int k, double h, int d) {
    if (k < 0 || k > d) throw std::domain_error("h_poly_derivs: require 0 <= k <= d");
    if (!(h >= 0.0 && h <= 1.0))
        throw std::domain_error("h_poly_derivs: require h in [0,1]");
    const double g = 0.5 * (h + 1.0);
    if (h >= 1e-8) {
        const double hk = h_poly(k, h, d);
        const double first = hk * (h * d + k) / (h * (h + 1.0));
        const double second = hk *
            ((static_cast<double>(k) * k - k) + 2.0 * h * k * (d - 1) +
             h * h * static_cast<double>(d) * (d - 1)) /
            (h * h * (h + 1.0) * (h + 1.0));
        return {hk, first, second};
    }
    auto ipow = [](double base, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    };
    const double hk = ipow(g, d - k) * ipow(h, k);
    double first = 0.0;
    if (d - k >= 1) first += 0.5 * (d - k) * ipow(g, d - k - 1) * ipow(h, k);
    if (k >= 1) first += k * ipow(g, d - k) * ipow(h, k - 1);
    double second = 0.0;
    if (d - k >= 2) second += 0.25 * (d - k) * (d - k - 1) * ipow(g, d - k - 2) * ipow(h, k);
    if (k >= 1 && d - k >= 1) second += k * (d - k) * ipow(g, d - k - 1) * ipow(h, k - 1);
    if (k >= 2) second += static_cast<double>(k) * (k - 1) * ipow(g, d - k) * ipow(h, k - 2);
    return {hk, first, second};
}

/// H(h) = sum_k P_k H_k(h); H(1) = 1 and all derivatives are nonnegative.
inline double big_h(const RegionTypeWeights& w, double h) {
    double sum = 0.0;
    for (int k = 0; k <= w.d; ++k) sum += w.p_k[k] * h_poly(k, h, w.d);
    return sum;
}

namespace detail {

// p = 1 - H(h) evaluated through eps = 1 - h so the deep tail keeps full
// relative accuracy after h rounds to 1:  1 - H_k = -expm1((d-k) log1p(-eps/2)
// + k log1p(-eps)), all summands positive.
inline double one_minus_big_h(const RegionTypeWeights& w, double eps) {
    const double lg = std::log1p(-0.5 * eps);
    const double lh = std::log1p(-eps);
    double p = 0.0;
    for (int k = 0; k <= w.d; ++k)
        p += w.p_k[k] * -std::expm1((w.d - k) * lg + k * lh);
    return p;
}

}  // namespace detail

/// Exact grid error probability p(t) = 1 - H(h((a/2) e^t)).
inline double ep_grid(const RegionTypeWeights& w, double a, double t) {
    const double c = 0.5 * a * std::exp(t);
    return detail::one_minus_big_h(w, one_minus_h(c));
}

inline double ep_grid(const GridConstellation& c, double t) {
    return ep_grid(classify_region_types(c), c.a, t);
}

}  // namespace epkit
