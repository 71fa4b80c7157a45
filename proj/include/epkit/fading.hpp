// SPDX-License-Identifier: Apache-2.0
//
// Densities of b = log a^2 for the supported fading families, their
// log-concavity witnesses, and the averaging operator
// p_avg(t) = E_b[p(t + b/2)] over a truncated integration window.

#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "epkit/concavity.hpp"
#include "epkit/gaussian.hpp"
#include "epkit/quadrature.hpp"
#include "epkit/roots.hpp"

namespace epkit {

// dB scale constant: b(dB) = nu * b(natural log).
inline constexpr double kNu = 4.3429448190325183;  // 10/ln 10

struct FadingModel {
    enum class Kind { nakagami, lognormal, mrc_rayleigh, none };

    Kind kind = Kind::none;
    double m = 1.0;         // Nakagami shape, >= 1/2
    double sigma_db = 8.0;  // log-normal dB spread, > 0
    int branches = 1;       // MRC branch count, >= 1

    static FadingModel nakagami(double m) {
        if (!(m >= 0.5)) throw std::domain_error("FadingModel: Nakagami requires m >= 1/2");
        FadingModel f;
        f.kind = Kind::nakagami;
        f.m = m;
        return f;
    }
    static FadingModel lognormal(double sigma_db) {
        if (!(sigma_db > 0.0))
            throw std::domain_error("FadingModel: log-normal requires sigma_db > 0");
        FadingModel f;
        f.kind = Kind::lognormal;
        f.sigma_db = sigma_db;
        return f;
    }
    static FadingModel mrc_rayleigh(int n) {
        if (n < 1) throw std::domain_error("FadingModel: MRC requires N >= 1");
        FadingModel f;
        f.kind = Kind::mrc_rayleigh;
        f.branches = n;
        return f;
    }
    static FadingModel none() { return FadingModel{}; }

    /// "nakagami:m=2" | "lognormal:sdb=8" | "mrc:n=4" | "none"
    static FadingModel parse(std::string_view s);

    /// E[a^2]: 1 for Nakagami, exp(sigma_db^2/(2 nu^2)) for zero-dB-median
    /// log-normal, N for MRC. Callers doing mean-SNR bookkeeping multiply by
    /// this; the densities themselves are as stated.
    double mean_a2() const {
        switch (kind) {
            case Kind::nakagami: return 1.0;
            case Kind::lognormal: return std::exp(sigma_db * sigma_db / (2.0 * kNu * kNu));
            case Kind::mrc_rayleigh: return static_cast<double>(branches);
            case Kind::none: return 1.0;
        }
        return 1.0;
    }

    /// Diversity order of the high-SNR asymptote, where one exists.
    double diversity_order() const {
        switch (kind) {
            case Kind::nakagami: return m;
            case Kind::mrc_rayleigh: return static_cast<double>(branches);
            default:
                throw std::domain_error("FadingModel: no log-linear asymptote for this model");
        }
    }

    std::string to_string() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::nakagami: os << "nakagami:m=" << m; break;
            case Kind::lognormal: os << "lognormal:sdb=" << sigma_db; break;
            case Kind::mrc_rayleigh: os << "mrc:n=" << branches; break;
            case Kind::none: os << "none"; break;
        }
        return os.str();
    }
};

inline FadingModel FadingModel::parse(std::string_view s) {
    auto num = [](std::string_view v) {
        return std::stod(std::string(v));
    };
    if (s == "none") return none();
    if (s.rfind("nakagami:m=", 0) == 0) return nakagami(num(s.substr(11)));
    if (s.rfind("lognormal:sdb=", 0) == 0) return lognormal(num(s.substr(14)));
    if (s.rfind("mrc:n=", 0) == 0) return mrc_rayleigh(static_cast<int>(num(s.substr(6))));
    throw std::invalid_argument("FadingModel: cannot parse '" + std::string(s) + "'");
}

/// Density of b = log a^2:
///   Nakagami-m:  (m^m/Gamma(m)) e^{m(z - e^z)}
///   log-normal:  (nu/(sqrt(2 pi) sigma_dB)) e^{-nu^2 z^2/(2 sigma_dB^2)}
///   MRC x N:     (1/(N-1)!) e^{N z - e^z}
inline double density_b(const FadingModel& model, double z) {
    switch (model.kind) {
        case FadingModel::Kind::nakagami:
            return std::exp(model.m * std::log(model.m) - std::lgamma(model.m) +
                            model.m * (z - std::exp(z)));
        case FadingModel::Kind::lognormal: {
            const double s = model.sigma_db / kNu;
            return std::exp(-0.5 * (z / s) * (z / s)) / (kSqrt2Pi * s);
        }
        case FadingModel::Kind::mrc_rayleigh:
            return std::exp(model.branches * z - std::exp(z) -
                            std::lgamma(static_cast<double>(model.branches)));
        case FadingModel::Kind::none:
            throw std::domain_error("density_b: no density for 'none'");
    }
    throw std::domain_error("density_b: bad model");
}

/// Analytic d^2/dz^2 log f_b: -m e^z, -nu^2/sigma_dB^2, -e^z respectively.
inline double log_density_second_derivative(const FadingModel& model, double z) {
    switch (model.kind) {
        case FadingModel::Kind::nakagami: return -model.m * std::exp(z);
        case FadingModel::Kind::lognormal: {
            const double s = model.sigma_db / kNu;
            return -1.0 / (s * s);
        }
        case FadingModel::Kind::mrc_rayleigh: return -std::exp(z);
        case FadingModel::Kind::none:
            throw std::domain_error("log_density_second_derivative: 'none'");
    }
    throw std::domain_error("log_density_second_derivative: bad model");
}

/// Grid check that log f_b is concave (the second derivative is <= 0
/// analytically; this records any numerical surprise as a violation).
inline std::vector<ViolationReport> check_density_logconcave(
    const FadingModel& model, const Interval& z_range, int steps = 201) {
    std::vector<ViolationReport> out;
    const double lo = std::isfinite(z_range.lo) ? z_range.lo : -40.0;
    const double hi = std::isfinite(z_range.hi) ? z_range.hi : 40.0;
    for (int i = 0; i < steps; ++i) {
        const double z = lo + (hi - lo) * i / (steps - 1);
        const double d2 = log_density_second_derivative(model, z);
        if (d2 > 0.0)
            out.push_back({"density-log-concavity", -1, -1, -1, z, d2, 0.0, -d2});
    }
    return out;
}

struct QuadratureSpec {
    // relative-dominant by default so deep-tail averages keep significant
    // digits; abs_tol is a floor for integrals that are genuinely tiny
    double abs_tol = 1e-300;
    double rel_tol = 1e-11;
    double tail_mass_cut = 1e-12;
    std::size_t max_evals = 400000;

    QuadratureSpec() = default;
    QuadratureSpec(double at, double rt, double cut, std::size_t me)
        : abs_tol(at), rel_tol(rt), tail_mass_cut(cut), max_evals(me) {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_mass_cut > 0.0))
            throw std::domain_error("QuadratureSpec: tolerances must be positive");
        if (max_evals < 100) throw std::domain_error("QuadratureSpec: max_evals >= 100");
    }
};

namespace detail {

// Inverse of Q on (0, 1/2): bracketed solve, only used for truncation.
inline double inverse_q(double p) {
    return find_root([p](double x) { return q_function(x) - p; }, 0.0, 42.0, 1e-12);
}

// Truncation window [z_lo, z_hi] holding all but < cut of f_b's mass per
// tail. Gaussian case is inverted analytically; the exponential-family
// densities use closed-form tail bounds sharpened by doubling.
inline Interval truncation_window(const FadingModel& model, double cut) {
    if (model.kind == FadingModel::Kind::lognormal) {
        const double s = model.sigma_db / kNu;
        const double z = s * inverse_q(cut);
        return {-z, z};
    }
    const double kappa = model.kind == FadingModel::Kind::nakagami
                             ? model.m
                             : static_cast<double>(model.branches);
    const double lambda = model.kind == FadingModel::Kind::nakagami ? model.m : 1.0;
    const double logC = model.kind == FadingModel::Kind::nakagami
                            ? model.m * std::log(model.m) - std::lgamma(model.m)
                            : -std::lgamma(static_cast<double>(model.branches));
    // lower tail: int_{-inf}^{z} C e^{kappa u - lambda e^u} du <= C e^{kappa z}/kappa
    const double z_lo = (std::log(cut * kappa) - logC) / kappa;
    // upper tail: once e^z >= 2 kappa/lambda the integrand decays at least
    // like e^{-lambda x / 2} in x = e^u, giving the bound
    // C x0^{kappa-1} e^{-lambda x0} (2/lambda); double z until it is < cut.
    double z_hi = std::log(std::max(2.0 * kappa / lambda, 4.0));
    for (int i = 0; i < 200; ++i) {
        const double x0 = std::exp(z_hi);
        const double log_bound =
            logC + (kappa - 1.0) * z_hi - lambda * x0 + std::log(2.0 / lambda);
        if (log_bound < std::log(cut)) return {z_lo, z_hi};
        z_hi += 1.0;
    }
    throw std::domain_error("truncation_window: failed to bound the upper tail");
}

}  // namespace detail

/// Fading-averaged EP at t: integral of curve(t + z/2) f_b(z) dz. Starts
/// from the mass-based truncation window and keeps extending the deep-fade
/// (left) side in strips until the added contribution is negligible: at high
/// SNR the average is carried by fades whose prior mass is far below any
/// fixed cut, so a pure mass cut would collapse the asymptote.
inline double average_ep(const std::function<double(double)>& curve,
                         const FadingModel& model, double t,
                         const QuadratureSpec& q = QuadratureSpec()) {
    if (model.kind == FadingModel::Kind::none) return curve(t);
    const Interval win = detail::truncation_window(model, q.tail_mass_cut);
    auto f = [&](double z) { return curve(t + 0.5 * z) * density_b(model, z); };
    const auto r = integrate(f, win.lo, win.hi, q.abs_tol, q.rel_tol, q.max_evals);
    double total = r.value;
    const double strip = 4.0;
    double left = win.lo;
    for (int i = 0; i < 400; ++i) {
        const auto seg = integrate(f, left - strip, left, q.abs_tol,
                                   0.1 * q.rel_tol, q.max_evals);
        total += seg.value;
        left -= strip;
        if (seg.value <= 0.1 * q.rel_tol * total + q.abs_tol) break;
    }
    return total;
}

}  // namespace epkit
