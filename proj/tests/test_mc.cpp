// SPDX-License-Identifier: Apache-2.0

#include "epkit/mc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "epkit/grid.hpp"

namespace {

using epkit::McConfig;
using epkit::McEstimate;

std::vector<std::vector<double>> grid_points(int n, int d, double a) {
    std::vector<std::vector<double>> pts;
    std::vector<int> idx(d, 0);
    const std::size_t m = static_cast<std::size_t>(std::pow(n, d) + 0.5);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> p(d);
        for (int ax = 0; ax < d; ++ax) p[ax] = (idx[ax] + 1) * a;
        pts.push_back(std::move(p));
        for (int ax = 0; ax < d; ++ax) {
            if (++idx[ax] < n) break;
            idx[ax] = 0;
        }
    }
    return pts;
}

TEST(McEp, AntipodalBpskMatchesQFunction) {
    const std::vector<std::vector<double>> pts = {{-1.0}, {1.0}};
    const McConfig cfg{1000000, 42, 1 << 18};
    const auto est = mc_ep(pts, {0.5, 0.5}, 0.0, cfg);
    const double expect = epkit::q_function(1.0);
    EXPECT_NEAR(est.p_hat, expect, 3.0 * est.std_err);
    EXPECT_DOUBLE_EQ(est.std_err,
                     std::sqrt(est.p_hat * (1.0 - est.p_hat) / cfg.samples));
}

TEST(McEp, FourByFourGridMatchesAnalytic) {
    const auto c = epkit::GridConstellation::uniform(4, 2, 2.0);
    const auto pts = grid_points(4, 2, 2.0);
    const McConfig cfg{2000000, 7, 1 << 19};
    const auto est = mc_ep(pts, c.priors, 0.0, cfg);
    EXPECT_NEAR(est.p_hat, epkit::ep_grid(c, 0.0), 3.0 * est.std_err);
}

TEST(McEp, NonUniformPriors) {
    // both ends see the same single decision boundary, so EP stays Q(1)
    const std::vector<std::vector<double>> pts = {{-1.0}, {1.0}};
    const auto est = mc_ep(pts, {0.9, 0.1}, 0.0, McConfig{1000000, 3, 1 << 18});
    EXPECT_NEAR(est.p_hat, epkit::q_function(1.0), 3.0 * est.std_err);
}

TEST(McEp, RejectsDegenerateInputs) {
    EXPECT_THROW(mc_ep({{1.0}}, {1.0}, 0.0, McConfig{}), std::domain_error);
    EXPECT_THROW(mc_ep({{1.0}, {1.0}}, {0.5, 0.5}, 0.0, McConfig{}), std::domain_error);
    EXPECT_THROW(mc_ep({{1.0}, {-1.0}}, {0.5, 0.5}, 0.0, McConfig{100, 1, 10}),
                 std::domain_error);
}

TEST(McEp, DeterministicForFixedSeed) {
    const std::vector<std::vector<double>> pts = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}};
    const std::vector<double> priors = {0.25, 0.25, 0.5};
    const McConfig cfg{500000, 12345, 1 << 16};
    const auto a = mc_ep(pts, priors, 0.3, cfg);
    const auto b = mc_ep(pts, priors, 0.3, cfg);
    EXPECT_EQ(a.p_hat, b.p_hat);  // bit-identical, threads notwithstanding
    EXPECT_EQ(a.std_err, b.std_err);
    const auto c = mc_ep(pts, priors, 0.3, McConfig{500000, 54321, 1 << 16});
    EXPECT_NE(a.p_hat, c.p_hat);  // seed actually matters
}

TEST(McBepGrayQam, QpskMatchesClosedForm) {
    const auto est = epkit::mc_bep_gray_qam(epkit::QamSpec(4), 4.0,
                                            McConfig{1000000, 11, 1 << 18});
    EXPECT_NEAR(est.p_hat, epkit::q_function(2.0), 3.0 * est.std_err);
}

TEST(McBepGrayQam, SixteenQamMatchesExactExpression) {
    const auto est = epkit::mc_bep_gray_qam(epkit::QamSpec(16), 10.0,
                                            McConfig{2000000, 13, 1 << 18});
    EXPECT_NEAR(est.p_hat, 0.058992725267914388, 3.0 * est.std_err);
}

TEST(McBepGrayQam, ZeroSnrLimitIsHalf) {
    const auto est = epkit::mc_bep_gray_qam(epkit::QamSpec(16), 1e-9,
                                            McConfig{500000, 17, 1 << 17});
    EXPECT_NEAR(est.p_hat, 0.5, 3.0 * est.std_err);
}

TEST(McSemantics, SepDominatesBepForGrayQam) {
    const double gamma = 10.0;
    const int M = 16;
    const double dlev = std::sqrt(3.0 * gamma / (M - 1));
    const auto pts = grid_points(4, 2, 2.0 * dlev);
    const std::vector<double> priors(16, 1.0 / 16.0);
    const McConfig cfg{2000000, 29, 1 << 19};
    const auto sep = mc_ep(pts, priors, 0.0, cfg);
    const auto bep = epkit::mc_bep_gray_qam(epkit::QamSpec(M), gamma, cfg);
    EXPECT_GT(sep.p_hat - bep.p_hat,
              -3.0 * std::sqrt(sep.std_err * sep.std_err + bep.std_err * bep.std_err));
}

TEST(McBepGrayQam, GrayLabelsDifferByOneBit) {
    for (int sm : {2, 4, 8}) {
        const auto labels = epkit::gray_axis_labels(sm);
        for (int i = 0; i + 1 < sm; ++i)
            EXPECT_EQ(__builtin_popcount(labels[i] ^ labels[i + 1]), 1) << sm;
    }
}

TEST(SplitStream, EquidistributionSmoke) {
    // 64-bin chi-square on uniforms and first two moments of the normals
    auto rng = epkit::detail::SplitMix64::substream(99, 0);
    const int n = 1 << 20;
    std::vector<int> bins(64, 0);
    for (int i = 0; i < n; ++i)
        ++bins[static_cast<std::size_t>(rng.next_unit() * 64.0) & 63];
    double chi2 = 0.0;
    const double expect = n / 64.0;
    for (int b : bins) chi2 += (b - expect) * (b - expect) / expect;
    EXPECT_LT(chi2, 125.0);  // df = 63, far tail cut

    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        s1 += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(double(n)));
    EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / double(n)));
}

TEST(SplitStream, SubstreamsDecorrelated) {
    auto a = epkit::detail::SplitMix64::substream(7, 0);
    auto b = epkit::detail::SplitMix64::substream(7, 1);
    int agree = 0;
    const int n = 4096;
    for (int i = 0; i < n; ++i)
        agree += (a.next_u64() >> 63) == (b.next_u64() >> 63);
    EXPECT_NEAR(double(agree) / n, 0.5, 0.05);
}

}  // namespace
