// SPDX-License-Identifier: Apache-2.0
//
// Adaptive M-QAM application layer: per-size SNR thresholds at a target BEP
// (exact inversion or the local-bound closed forms), mean spectral
// efficiency under log-normal shadowing of the mean SNR in dB, and the
// EP-based outage probability.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "epkit/bounds.hpp"
#include "epkit/fading.hpp"
#include "epkit/gaussian.hpp"
#include "epkit/modem.hpp"

namespace epkit {

enum class ThresholdMode { exact, lub, llb };

struct AdaptiveScheme {
    std::vector<int> sizes;  // strictly increasing, each square QAM
    double target_bep;
    ThresholdMode mode = ThresholdMode::exact;
    FadingModel fading;  // small-scale model used to average the BEP curves
    int diversity = 1;   // diversity order D for the bound construction

    AdaptiveScheme(std::vector<int> sz, double target, ThresholdMode md,
                   FadingModel fm, int div)
        : sizes(std::move(sz)), target_bep(target), mode(md), fading(fm), diversity(div) {
        if (sizes.empty()) throw std::domain_error("AdaptiveScheme: need at least one size");
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            QamSpec check(sizes[i]);  // validates square QAM
            if (i > 0 && sizes[i] <= sizes[i - 1])
                throw std::domain_error("AdaptiveScheme: sizes must be strictly increasing");
        }
        if (!(target_bep > 0.0 && target_bep < 0.5))
            throw std::domain_error("AdaptiveScheme: target BEP must be in (0, 1/2)");
        if (diversity < 1) throw std::domain_error("AdaptiveScheme: diversity >= 1");
    }
};

/// Fading-averaged BEP of one constellation as a function of mean SNR
/// (gbar = e^{2t} bookkeeping; for MRC this is per-branch mean SNR).
inline std::function<double(double)> averaged_qam_bep_curve(
    int M, const FadingModel& fading, const QuadratureSpec& q = QuadratureSpec()) {
    QamSpec spec(M);
    return [spec, fading, q](double gbar) {
        auto inst = [spec](double t) { return qam_bep_exact(spec, std::exp(2.0 * t)); };
        return average_ep(inst, fading, 0.5 * std::log(gbar), q);
    };
}

/// Default ROI for local-bound thresholds: one decade around the target,
/// clipped to stay inside (0, 1/2).
inline RoiSpec default_threshold_roi(double target_bep) {
    return RoiSpec(target_bep / 10.0, std::min(10.0 * target_bep, 0.45));
}

/// Required mean SNR (dB) per constellation size at the target BEP, per the
/// scheme's threshold mode. Strictly increasing by construction, verified.
inline std::vector<double> thresholds(const AdaptiveScheme& scheme,
                                      const RoiSpec* roi = nullptr,
                                      const QuadratureSpec& q = QuadratureSpec()) {
    const RoiSpec use_roi = roi ? *roi : default_threshold_roi(scheme.target_bep);
    std::vector<double> out;
    out.reserve(scheme.sizes.size());
    for (int M : scheme.sizes) {
        const auto curve = averaged_qam_bep_curve(M, scheme.fading, q);
        double gbar;
        if (scheme.mode == ThresholdMode::exact) {
            gbar = invert_ep(curve, scheme.target_bep);
        } else {
            const auto asym = estimate_asymptote(curve, static_cast<double>(scheme.diversity));
            const auto lb = build_local_bounds(curve, asym, use_roi);
            gbar = scheme.mode == ThresholdMode::lub ? lub_inverse(lb, scheme.target_bep)
                                                     : llb_inverse(lb, scheme.target_bep);
        }
        out.push_back(10.0 * std::log10(gbar));
    }
    for (std::size_t j = 1; j < out.size(); ++j)
        if (!(out[j] > out[j - 1]))
            throw std::domain_error("thresholds: not strictly increasing");
    return out;
}

struct ShadowingSpec {
    double median_db;
    double sigma_db;

    ShadowingSpec(double med, double sig) : median_db(med), sigma_db(sig) {
        if (!(sigma_db > 0.0)) throw std::domain_error("ShadowingSpec: sigma_db > 0");
    }

    /// CDF of gbar_dB (Gaussian in dB). Single hook so another shadowing
    /// family can be swapped in.
    double cdf(double gamma_db) const {
        return normal_cdf((gamma_db - median_db) / sigma_db);
    }
};

/// Mean spectral efficiency
///   eta = sum_{j<J} log2(M_j) [F(th_{j+1}) - F(th_j)] + log2(M_J)(1 - F(th_J)).
/// SNR below the lowest threshold carries zero rate.
inline double mean_spectral_efficiency(const std::vector<int>& sizes,
                                       const std::vector<double>& thresholds_db,
                                       const ShadowingSpec& shadow) {
    if (sizes.size() != thresholds_db.size() || sizes.empty())
        throw std::domain_error("mean_spectral_efficiency: sizes/thresholds mismatch");
    for (std::size_t j = 1; j < thresholds_db.size(); ++j)
        if (!(thresholds_db[j] > thresholds_db[j - 1]))
            throw std::domain_error("mean_spectral_efficiency: thresholds must increase");
    const std::size_t J = sizes.size() - 1;
    double eta = 0.0;
    for (std::size_t j = 0; j < J; ++j)
        eta += std::log2(static_cast<double>(sizes[j])) *
               (shadow.cdf(thresholds_db[j + 1]) - shadow.cdf(thresholds_db[j]));
    eta += std::log2(static_cast<double>(sizes[J])) * (1.0 - shadow.cdf(thresholds_db[J]));
    return eta;
}

/// EP-based outage: probability that the shadowed mean SNR falls below the
/// SNR required for the target EP.
inline double error_outage(double required_gamma_db, const ShadowingSpec& shadow) {
    return shadow.cdf(required_gamma_db);
}

}  // namespace epkit
