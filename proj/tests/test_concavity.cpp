// SPDX-License-Identifier: Apache-2.0

#include "epkit/concavity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "epkit/grid.hpp"
#include "epkit/mc.hpp"

namespace {

using epkit::GridConstellation;
using epkit::RegionTypeWeights;
using epkit::SweepGrid;

RegionTypeWeights uniform_weights(int n, int d) {
    return classify_region_types(GridConstellation::uniform(n, d, 2.0));
}

double lemma1_slack(const RegionTypeWeights& w, double h) {
    double H = 0.0, Hp = 0.0, Hpp = 0.0;
    for (int k = 0; k <= w.d; ++k) {
        const auto c = epkit::h_poly_derivs(k, h, w.d);
        H += w.p_k[k] * c.value;
        Hp += w.p_k[k] * c.first;
        Hpp += w.p_k[k] * c.second;
    }
    return (1.0 - h) * Hp * Hp - (1.0 - H) * (Hp - (1.0 - h) * Hpp);
}

TEST(Lemma1, DimensionOneIsExactEquality) {
    for (double p0 : {0.0, 0.3, 0.5, 1.0}) {
        RegionTypeWeights w(1, {p0, 1.0 - p0});
        for (double h = 0.0; h < 1.0; h += 0.01)
            EXPECT_LE(std::fabs(lemma1_slack(w, h)), 1e-12) << p0 << " " << h;
        EXPECT_TRUE(check_lemma1(w, SweepGrid::uniform(1000)).empty());
    }
}

TEST(Lemma1, UniformFourByFourSweepIsClean) {
    const auto w = uniform_weights(4, 2);
    EXPECT_TRUE(check_lemma1(w, SweepGrid::uniform(1000)).empty());
}

TEST(Lemma1, HoldsTriviallyAtHEqualOne) {
    const auto w = uniform_weights(4, 2);
    EXPECT_NEAR(epkit::big_h(w, 1.0), 1.0, 1e-15);
    EXPECT_GE(lemma1_slack(w, 1.0), -1e-15);  // both sides vanish
}

TEST(Lemma1, ImpliedByLemma2ForRandomPriors) {
    // quadratic form sum_km P_k P_m H_km >= 0 for random prior vectors
    auto rng = epkit::detail::SplitMix64::substream(2024, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 5);
        std::vector<double> p(static_cast<std::size_t>(d) + 1);
        double sum = 0.0;
        for (auto& v : p) sum += (v = rng.next_unit());
        for (auto& v : p) v /= sum;
        RegionTypeWeights w(d, p);
        for (double h : {0.0, 0.17, 0.5, 0.83, 0.999})
            EXPECT_GE(lemma1_slack(w, h), -1e-12) << "d=" << d << " h=" << h;
    }
}

TEST(Lemma2, SmallAndLargeDimensionSweepsAreClean) {
    SweepGrid coarse;
    coarse.h_points = {0.0, 0.25, 0.5, 0.75, 0.99};
    EXPECT_TRUE(check_lemma2(2, coarse).empty());
    EXPECT_TRUE(check_lemma2(10, SweepGrid::uniform(1000)).empty());
}

TEST(Lemma2, VanishesForTopIndicesNearOne) {
    const int d = 3;
    const auto K = epkit::h_poly_derivs(d, 1.0 - 1e-9, d);
    const double slack = (1.0 - (1.0 - 1e-9)) * K.first * K.first -
                         (1.0 - K.value) * (K.first - (1.0 - (1.0 - 1e-9)) * K.second);
    EXPECT_NEAR(slack, 0.0, 1e-8);
}

TEST(Lemma2, RequiresDimensionAboveOne) {
    EXPECT_THROW(check_lemma2(1, SweepGrid::uniform(10)), std::domain_error);
}

TEST(Keystone, CleanSweepAndReductionClaims) {
    std::vector<double> grid;
    for (int i = 0; i < 200; ++i) grid.push_back(i / 200.0);
    for (int d : {2, 3, 5, 8})
        for (int k = 0; k <= d; ++k)
            for (int m = 0; m <= d; ++m)
                EXPECT_TRUE(epkit::check_keystone_inequality(d, k, m, grid).empty())
                    << d << " " << k << " " << m;
}

TEST(Keystone, GapFormulaPinnedValue) {
    // (d-1)(1-h)h/(1+hd) at d=3, h=1/2 is 0.2
    const double gap = (3 - 1) * (1.0 - 0.5) * 0.5 / (1.0 + 0.5 * 3);
    EXPECT_DOUBLE_EQ(gap, 0.2);
    // the sweep checks the rearranged-RHS gap against the same closed form
    EXPECT_TRUE(epkit::check_keystone_inequality(3, 0, 1, {0.5}).empty());
}

TEST(Keystone, BoundaryHZero) {
    for (int d : {2, 4})
        for (int k = 0; k <= d; ++k)
            for (int m = 0; m <= d; ++m)
                EXPECT_TRUE(epkit::check_keystone_inequality(d, k, m, {0.0}).empty());
}

TEST(BinomialIdentities, SpotSumsAndFullRange) {
    auto sums = [](int n) {
        long long s0 = 0, s1 = 0, s2 = 0;
        for (int a = 0; a <= n; ++a) {
            long long c = 1;
            for (int i = 0; i < a; ++i) c = c * (n - i) / (i + 1);
            s0 += c;
            s1 += a * c;
            s2 += static_cast<long long>(a) * a * c;
        }
        return std::make_tuple(s0, s1, s2);
    };
    auto [a0, a1, a2] = sums(1);
    EXPECT_EQ(a0, 2);
    EXPECT_EQ(a1, 1);
    EXPECT_EQ(a2, 1);
    auto [b0, b1, b2] = sums(10);
    EXPECT_EQ(b0, 1024);
    EXPECT_EQ(b1, 5120);
    EXPECT_EQ(b2, 28160);
    EXPECT_TRUE(epkit::check_binomial_identities(60));
    EXPECT_THROW(epkit::check_binomial_identities(61), std::overflow_error);
    EXPECT_THROW(epkit::check_binomial_identities(0), std::domain_error);
}

TEST(BinomialIdentities, AlternatingSumVanishes) {
    // sum_a C(3,a)(3-2a) = 0 (d=5, m=2 case)
    long long s = 0;
    for (int a = 0; a <= 3; ++a) {
        long long c = 1;
        for (int i = 0; i < a; ++i) c = c * (3 - i) / (i + 1);
        s += c * (3 - 2 * a);
    }
    EXPECT_EQ(s, 0);
}

TEST(RPositivity, CleanSweepsUpToFortyAndReports) {
    std::vector<double> grid;
    for (int i = 0; i < 100; ++i) grid.push_back(i / 100.0);
    for (int d : {2, 3, 6, 10, 40}) {
        std::vector<epkit::R1Report> reports;
        const auto v = epkit::check_r_positivity(d, grid, 1e-12, &reports);
        EXPECT_TRUE(v.empty()) << "d = " << d << ", first: " << (v.empty() ? "" : v[0].check);
        EXPECT_EQ(reports.size(), static_cast<std::size_t>(d) + 1);
        for (const auto& r : reports) {
            EXPECT_GE(r.r1, 0) << "d=" << r.d << " m=" << r.m;
            EXPECT_TRUE(r.closed_form_matches) << "d=" << r.d << " m=" << r.m;
        }
    }
}

TEST(RPositivity, DegenerateEdges) {
    // d=2: r(h) has the single coefficient c_0 = 0, so r(1) = 0
    std::vector<epkit::R1Report> reports;
    EXPECT_TRUE(epkit::check_r_positivity(2, {0.0, 0.5, 0.9}, 1e-12, &reports).empty());
    EXPECT_EQ(reports[0].r1, 0);  // m = 0
    EXPECT_EQ(reports[2].r1, 0);  // m = d: empty/singleton sums
    EXPECT_THROW(epkit::check_r_positivity(1, {0.5}), std::domain_error);
}

TEST(RPositivity, PrintedFormsDisagreeWhereExpected) {
    // the two published closed forms do not reproduce the exact coefficient
    // sum everywhere; the reports flag this instead of hiding it
    std::vector<epkit::R1Report> reports;
    epkit::check_r_positivity(3, {0.5}, 1e-12, &reports);
    EXPECT_EQ(reports[0].r1, 3);                    // m = 0, exact
    EXPECT_EQ(reports[0].printed_bracket_x4, 48);   // 4 * 12
    EXPECT_EQ(reports[0].printed_quadratic, 12);
    EXPECT_FALSE(reports[0].printed_forms_match);
    EXPECT_TRUE(reports[0].closed_form_matches);
}

TEST(LogConcavity, GaussianTailSurrogateIsConcave) {
    auto curve = [](double t) { return std::exp(-std::exp(2.0 * t)); };
    EXPECT_TRUE(epkit::check_log_concavity_numeric(curve, -3.0, 1.5, 301).empty());
}

TEST(LogConcavity, GridCurveIsConcave) {
    const auto c = GridConstellation::uniform(4, 2, 2.0);
    auto curve = [&](double t) { return epkit::ep_grid(c, t); };
    EXPECT_TRUE(epkit::check_log_concavity_numeric(curve, -3.0, 3.0, 601).empty());
}

TEST(LogConcavity, NegativeControlIsCaught) {
    // a floor-clipped decaying exponential has a convex kink in log scale
    auto curve = [](double t) { return std::max(1e-4, 0.25 * std::exp(-2.0 * t)); };
    const auto v = epkit::check_log_concavity_numeric(curve, 0.0, 8.0, 401);
    EXPECT_FALSE(v.empty());
}

TEST(LogConcavity, PropagatesEvaluationFailure) {
    auto curve = [](double t) { return t < 0.0 ? 1e-3 : 0.0; };  // hits zero
    EXPECT_THROW(epkit::check_log_concavity_numeric(curve, -1.0, 1.0, 11),
                 std::domain_error);
}

TEST(Violations, SortedDeterministically) {
    // force violations with an impossible tolerance and check ordering
    SweepGrid g;
    g.h_points = {0.9, 0.1, 0.5};
    g.tolerance = -1.0;  // everything "fails"
    const auto w = uniform_weights(4, 2);
    const auto v = check_lemma1(w, g);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_LT(v[0].x, v[1].x);
    EXPECT_LT(v[1].x, v[2].x);
}

}  // namespace
