// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo estimator of error probabilities for arbitrary finite
// constellations with nearest-neighbor decision (lowest index wins ties).
// Random streams are splittable: batch i draws from a generator seeded by
// (seed, i) only, so the merged estimate is independent of scheduling order
// and bit-identical across reruns.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "epkit/modem.hpp"

namespace epkit {

struct McConfig {
    long long samples = 1000000;
    std::uint64_t seed = 1;
    long long batch = 1 << 20;  // samples per substream
};

struct McEstimate {
    double p_hat;
    double std_err;  // sqrt(p_hat (1 - p_hat) / samples)
    long long samples;
    std::uint64_t seed;
};

namespace detail {

// splitmix64: tiny, statistically solid, and trivially splittable by seed.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        // decorrelate substreams by seeding with a distinct odd stride
        return SplitMix64(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    }
    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double next_unit() {  // uniform in (0, 1]
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }
    // Box-Muller; second variate cached. Portable (no libstdc++
    // distribution internals), so results are stable across platforms.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * kPi * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

  private:
    double spare_ = 0.0;
    bool have_spare_ = false;
};

template <typename PerBatch>
long long run_batches(long long samples, long long batch, PerBatch&& body) {
    const long long nbatch = (samples + batch - 1) / batch;
    std::vector<long long> errors(static_cast<std::size_t>(nbatch), 0);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<long long> next{0};
    auto worker = [&] {
        for (;;) {
            const long long bi = next.fetch_add(1);
            if (bi >= nbatch) return;
            const long long lo = bi * batch;
            const long long len = std::min(batch, samples - lo);
            errors[static_cast<std::size_t>(bi)] = body(bi, len);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < hw; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return std::accumulate(errors.begin(), errors.end(), 0LL);
}

}  // namespace detail

/// SEP estimate for an arbitrary finite constellation at noise sigma = e^{-t}.
inline McEstimate mc_ep(const std::vector<std::vector<double>>& points,
                        const std::vector<double>& priors, double t,
                        const McConfig& cfg) {
    const std::size_t m = points.size();
    if (m < 2) throw std::domain_error("mc_ep: need at least 2 points");
    if (priors.size() != m) throw std::domain_error("mc_ep: priors size mismatch");
    if (cfg.samples < 1000) throw std::domain_error("mc_ep: require samples >= 1000");
    const std::size_t d = points[0].size();
    for (const auto& p : points)
        if (p.size() != d) throw std::domain_error("mc_ep: inconsistent dimensions");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double dist2 = 0.0;
            for (std::size_t ax = 0; ax < d; ++ax) {
                const double dx = points[i][ax] - points[j][ax];
                dist2 += dx * dx;
            }
            if (dist2 == 0.0)
                throw std::domain_error("mc_ep: degenerate constellation (duplicate points)");
        }
    std::vector<double> cdf(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        acc += priors[i];
        cdf[i] = acc;
    }
    cdf[m - 1] = 1.0 + 1e-9;  // guard against rounding at the top
    const double sigma = std::exp(-t);

    const long long err = detail::run_batches(
        cfg.samples, cfg.batch, [&](long long bi, long long len) {
            auto rng = detail::SplitMix64::substream(cfg.seed, static_cast<std::uint64_t>(bi));
            std::vector<double> x(d);
            long long bad = 0;
            for (long long s = 0; s < len; ++s) {
                const double u = rng.next_unit();
                std::size_t tx = 0;
                while (cdf[tx] < u) ++tx;
                for (std::size_t ax = 0; ax < d; ++ax)
                    x[ax] = points[tx][ax] + sigma * rng.next_normal();
                std::size_t best = 0;
                double best_d2 = 0.0;
                for (std::size_t ax = 0; ax < d; ++ax) {
                    const double dx = x[ax] - points[0][ax];
                    best_d2 += dx * dx;
                }
                for (std::size_t j = 1; j < m; ++j) {
                    double d2 = 0.0;
                    for (std::size_t ax = 0; ax < d; ++ax) {
                        const double dx = x[ax] - points[j][ax];
                        d2 += dx * dx;
                    }
                    if (d2 < best_d2) {  // strict: ties keep the lowest index
                        best_d2 = d2;
                        best = j;
                    }
                }
                if (best != tx) ++bad;
            }
            return bad;
        });

    const double p = static_cast<double>(err) / static_cast<double>(cfg.samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.samples)),
            cfg.samples, cfg.seed};
}

namespace detail {

inline unsigned gray_encode(unsigned i) { return i ^ (i >> 1); }

}  // namespace detail

/// Gray-mapped square M-QAM bit error rate by simulation at symbol SNR gamma.
/// Per-axis sqrt(M)-PAM levels (2i+1-sqrt M) d with d = sqrt(3 gamma/(M-1))
/// and unit noise per axis, reflected-binary Gray labels along each axis.
inline McEstimate mc_bep_gray_qam(const QamSpec& spec, double gamma,
                                  const McConfig& cfg) {
    if (!(gamma > 0.0)) throw std::domain_error("mc_bep_gray_qam: require gamma > 0");
    if (cfg.samples < 1000)
        throw std::domain_error("mc_bep_gray_qam: require samples >= 1000");
    const int sm = spec.sqrt_m();  // power of two, so % sm below is unbiased
    const double dlev = std::sqrt(3.0 * gamma / (spec.M - 1));

    const long long bit_errors = detail::run_batches(
        cfg.samples, cfg.batch, [&](long long bi, long long len) {
            auto rng = detail::SplitMix64::substream(cfg.seed, static_cast<std::uint64_t>(bi));
            long long bad = 0;
            for (long long s = 0; s < len; ++s) {
                for (int axis = 0; axis < 2; ++axis) {
                    const unsigned tx = static_cast<unsigned>(rng.next_u64() % sm);
                    const double level = (2.0 * tx + 1.0 - sm) * dlev;
                    const double r = level + rng.next_normal();
                    int rx = static_cast<int>(std::lround((r / dlev - 1.0 + sm) / 2.0));
                    rx = std::min(std::max(rx, 0), sm - 1);
                    unsigned diff = detail::gray_encode(tx) ^
                                    detail::gray_encode(static_cast<unsigned>(rx));
                    bad += __builtin_popcount(diff);
                }
            }
            return bad;
        });

    const double p = static_cast<double>(bit_errors) /
                     (static_cast<double>(cfg.samples) * spec.bits_per_symbol());
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.samples)),
            cfg.samples, cfg.seed};
}

/// Reflected-binary Gray label of each PAM level index, lowest level first.
/// Exposed so the bit-to-symbol table can be dumped for inspection.
inline std::vector<unsigned> gray_axis_labels(int sqrt_m) {
    std::vector<unsigned> labels(static_cast<std::size_t>(sqrt_m));
    for (int i = 0; i < sqrt_m; ++i)
        labels[static_cast<std::size_t>(i)] = detail::gray_encode(static_cast<unsigned>(i));
    return labels;
}

}  // namespace epkit
