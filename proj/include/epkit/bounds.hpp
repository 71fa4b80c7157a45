// SPDX-License-Identifier: Apache-2.0
//
// Log-linear asymptote v(gbar) = K/gbar^D, the global upper bound
// min{1/2, v}, required-SNR inversions, and the ROI-anchored local
// upper/lower bounds with their closed-form inverses.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "epkit/roots.hpp"

namespace epkit {

struct AsymptoteSpec {
    double K;
    double D;

    AsymptoteSpec(double k, double d) : K(k), D(d) {
        if (!(K > 0.0) || !(D > 0.0))
            throw std::domain_error("AsymptoteSpec: require K > 0 and D > 0");
    }
};

struct RoiSpec {
    double pe_min;
    double pe_max;

    RoiSpec(double lo, double hi) : pe_min(lo), pe_max(hi) {
        if (!(0.0 < pe_min && pe_min < pe_max && pe_max < 0.5))
            throw std::domain_error("RoiSpec: require 0 < pe_min < pe_max < 1/2");
    }
};

/// Global upper bound P_eUB(gbar) = min{1/2, K/gbar^D}.
inline double ub_ep(const AsymptoteSpec& asym, double gamma_bar) {
    if (!(gamma_bar > 0.0)) throw std::domain_error("ub_ep: require gamma_bar > 0");
    return std::min(0.5, asym.K / std::pow(gamma_bar, asym.D));
}

/// Required SNR under the asymptotic bound: gbar_UB = (K/pe)^{1/D}.
inline double ub_inverse(const AsymptoteSpec& asym, double pe_target) {
    if (!(pe_target > 0.0 && pe_target < 0.5))
        throw std::domain_error("ub_inverse: target must lie in (0, 1/2)");
    return std::pow(asym.K / pe_target, 1.0 / asym.D);
}

/// Estimate K by probing gbar^D curve(gbar) at geometrically increasing SNR
/// until successive estimates settle to 1e-4 relative, then validate the
/// local log-log slope against -D (2% window). Curves with no log-linear
/// asymptote (e.g. AWGN-only) fail the validation before gbar reaches 1e9.
inline AsymptoteSpec estimate_asymptote(const std::function<double(double)>& curve,
                                        double d_hint) {
    if (!(d_hint > 0.0)) throw std::domain_error("estimate_asymptote: D_hint > 0");
    const double growth = 4.0;
    double gbar = 100.0;
    double prev = std::pow(gbar, d_hint) * curve(gbar);
    while (gbar < 1e9) {
        gbar *= growth;
        const double k_hat = std::pow(gbar, d_hint) * curve(gbar);
        if (k_hat > 0.0 && std::fabs(k_hat / prev - 1.0) < 1e-4) {
            const double up = curve(gbar * 1.5), dn = curve(gbar / 1.5);
            if (!(up > 0.0 && dn > 0.0))
                throw NonConvergenceError("estimate_asymptote: curve vanished during probe");
            const double slope = (std::log(up) - std::log(dn)) / (2.0 * std::log(1.5));
            if (std::fabs(slope + d_hint) > 0.02 * d_hint)
                throw NonConvergenceError(
                    "estimate_asymptote: local slope does not match -D (no log-linear "
                    "asymptote)");
            return {k_hat, d_hint};
        }
        prev = k_hat;
        if (!(prev > 0.0))
            throw NonConvergenceError("estimate_asymptote: curve vanished during probe");
    }
    throw NonConvergenceError(
        "estimate_asymptote: no convergence below gbar = 1e9 (no log-linear asymptote)");
}

/// Exact-curve inversion: the gbar with curve(gbar) = pe_target, found by
/// Brent iteration on log gbar. The bracket must straddle the target on a
/// decreasing curve.
inline double invert_ep(const std::function<double(double)>& curve, double pe_target,
                        double bracket_lo, double bracket_hi) {
    if (!(pe_target > 0.0)) throw std::domain_error("invert_ep: target must be positive");
    if (!(bracket_lo > 0.0 && bracket_hi > bracket_lo))
        throw std::domain_error("invert_ep: bad bracket");
    const double f_lo = curve(bracket_lo), f_hi = curve(bracket_hi);
    if (f_lo < f_hi)
        throw NonMonotoneError("invert_ep: curve increases across the bracket");
    if (!(f_lo >= pe_target && pe_target >= f_hi))
        throw BracketError("invert_ep: bracket does not straddle the target");
    // solve in u = log gbar for uniform dB resolution
    auto g = [&](double u) { return std::log(curve(std::exp(u)) / pe_target); };
    const double u = find_root(g, std::log(bracket_lo), std::log(bracket_hi), 1e-13);
    const double gbar = std::exp(u);
    const double achieved = curve(gbar);
    if (std::fabs(achieved - pe_target) > 1e-10 * pe_target)
        throw NonConvergenceError("invert_ep: residual exceeds 1e-10 relative");
    return gbar;
}

/// Auto-bracketing variant: scans decade steps over [1e-9, 1e12].
inline double invert_ep(const std::function<double(double)>& curve, double pe_target) {
    double lo = 1e-9;
    double f_lo = curve(lo);
    for (double hi = lo * 10.0; hi <= 1e12; hi *= 10.0) {
        const double f_hi = curve(hi);
        if (f_lo >= pe_target && pe_target >= f_hi)
            return invert_ep(curve, pe_target, lo, hi);
        lo = hi;
        f_lo = f_hi;
    }
    throw BracketError("invert_ep: target not spanned on [1e-9, 1e12]");
}

/// Everything needed to evaluate and invert the ROI-local bounds: the exact
/// anchors (gamma_m at pe_min, gamma_M at pe_max) and the linear-scale dB
/// shifts of the asymptotic bound onto them.
struct LocalBoundSet {
    RoiSpec roi;
    AsymptoteSpec asym;
    double gamma_m;  // exact required SNR at pe_min (the low-EP end)
    double gamma_M;  // exact required SNR at pe_max
    double delta_m;  // gbar_UB(pe_min)/gamma_m, >= 1, linear scale
    double delta_M;  // gbar_UB(pe_max)/gamma_M, >= 1

    LocalBoundSet(RoiSpec r, AsymptoteSpec a, double gm, double gM, double dm, double dM)
        : roi(r), asym(a), gamma_m(gm), gamma_M(gM), delta_m(dm), delta_M(dM) {
        if (!(gamma_m > gamma_M))
            throw std::domain_error("LocalBoundSet: require gamma_m > gamma_M");
        if (delta_m < 1.0 - 1e-9 || delta_M < 1.0 - 1e-9)
            throw std::domain_error("LocalBoundSet: shifts must be >= 1");
    }

    double delta_m_db() const { return 10.0 * std::log10(delta_m); }
    double delta_M_db() const { return 10.0 * std::log10(delta_M); }
};

/// Anchor the local bounds on an exact curve: gamma_m/gamma_M by root
/// finding, shifts from the asymptotic inverse.
inline LocalBoundSet build_local_bounds(const std::function<double(double)>& curve,
                                        const AsymptoteSpec& asym, const RoiSpec& roi) {
    double gm, gM;
    try {
        gM = invert_ep(curve, roi.pe_max);
        gm = invert_ep(curve, roi.pe_min);
    } catch (const BracketError&) {
        throw std::domain_error("build_local_bounds: curve does not span the ROI");
    }
    const double dm = ub_inverse(asym, roi.pe_min) / gm;
    const double dM = ub_inverse(asym, roi.pe_max) / gM;
    return LocalBoundSet(roi, asym, gm, gM, dm, dM);
}

/// Variant taking user-supplied anchors (the required SNRs may be known).
inline LocalBoundSet build_local_bounds(double gamma_m, double gamma_M,
                                        const AsymptoteSpec& asym, const RoiSpec& roi) {
    return LocalBoundSet(roi, asym, gamma_m, gamma_M,
                         ub_inverse(asym, roi.pe_min) / gamma_m,
                         ub_inverse(asym, roi.pe_max) / gamma_M);
}

/// Local upper bound P_eLUB(gbar) = min{pe_max, P_eUB(gbar delta_m)}.
inline double lub_ep(const LocalBoundSet& lb, double gamma_bar) {
    if (!(gamma_bar > 0.0)) throw std::domain_error("lub_ep: require gamma_bar > 0");
    return std::min(lb.roi.pe_max, ub_ep(lb.asym, gamma_bar * lb.delta_m));
}

/// Closed-form inverse, gbar_LUB = gamma_m (pe_min/pe)^{1/D}, pe in the ROI.
inline double lub_inverse(const LocalBoundSet& lb, double pe_target) {
    if (!(pe_target >= lb.roi.pe_min && pe_target <= lb.roi.pe_max))
        throw std::domain_error("lub_inverse: target outside the ROI");
    return lb.gamma_m * std::pow(lb.roi.pe_min / pe_target, 1.0 / lb.asym.D);
}

/// Local lower bound P_eLLB(gbar) = max{pe_min, P_eUB(gbar delta_M)}.
inline double llb_ep(const LocalBoundSet& lb, double gamma_bar) {
    if (!(gamma_bar > 0.0)) throw std::domain_error("llb_ep: require gamma_bar > 0");
    return std::max(lb.roi.pe_min, ub_ep(lb.asym, gamma_bar * lb.delta_M));
}

/// Closed-form inverse, gbar_LLB = gamma_M (pe_max/pe)^{1/D}, pe in the ROI.
inline double llb_inverse(const LocalBoundSet& lb, double pe_target) {
    if (!(pe_target >= lb.roi.pe_min && pe_target <= lb.roi.pe_max))
        throw std::domain_error("llb_inverse: target outside the ROI");
    return lb.gamma_M * std::pow(lb.roi.pe_max / pe_target, 1.0 / lb.asym.D);
}

}  // namespace epkit
