// SPDX-License-Identifier: Apache-2.0
//
// Tiny usage demo: exact 16-QAM BEP in AWGN next to its Rayleigh average,
// plus the local bounds anchored on the ROI [1e-3, 1e-1].

#include <cstdio>

#include "epkit/epkit.hpp"

int main() {
    using namespace epkit;

    const QamSpec qam(16);
    const FadingModel rayleigh = FadingModel::nakagami(1.0);
    auto avg = averaged_qam_bep_curve(qam.M, rayleigh);

    const auto asym = estimate_asymptote(avg, 1.0);
    const auto lb = build_local_bounds(avg, asym, RoiSpec(1e-3, 1e-1));
    std::printf("asymptote: K = %.6f, D = %.1f\n", asym.K, asym.D);
    std::printf("anchors: gamma_m = %.3f dB, gamma_M = %.3f dB\n",
                10.0 * std::log10(lb.gamma_m), 10.0 * std::log10(lb.gamma_M));

    std::printf("%8s %12s %12s %12s %12s %12s\n", "g_dB", "awgn", "rayleigh",
                "lub", "llb", "ub");
    for (double db = 0.0; db <= 30.0; db += 2.0) {
        const double g = std::pow(10.0, db / 10.0);
        std::printf("%8.1f %12.4e %12.4e %12.4e %12.4e %12.4e\n", db,
                    qam_bep_exact(qam, g), avg(g), lub_ep(lb, g), llb_ep(lb, g),
                    ub_ep(asym, g));
    }
    return 0;
}
