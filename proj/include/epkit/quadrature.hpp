// SPDX-License-Identifier: Apache-2.0
//
// Globally adaptive Gauss-Kronrod (7,15) quadrature on a finite interval.
// The worst segment (largest error estimate) is bisected until the summed
// error estimate meets max(abs_tol, rel_tol * |integral|) or the evaluation
// budget runs out, in which case QuadratureError carries what was achieved.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace epkit {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, QuadratureResult achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    const QuadratureResult& achieved() const { return achieved_; }

  private:
    QuadratureResult achieved_;
};

namespace detail {

// Kronrod-15 nodes on [-1,1]; the embedded Gauss-7 nodes are the odd indices.
inline constexpr double kGk15Nodes[15] = {
    -0.991455371120812639207, -0.949107912342758524526, -0.86486442335976907279,
    -0.741531185599394439864, -0.586087235467691130294, -0.405845151377397166907,
    -0.207784955007898467601, 0.0,                       0.207784955007898467601,
    0.405845151377397166907,  0.586087235467691130294,  0.741531185599394439864,
    0.86486442335976907279,   0.949107912342758524526,  0.991455371120812639207,
};
inline constexpr double kGk15WeightsK[15] = {
    0.0229353220105292249637, 0.0630920926299785532907, 0.10479001032225018384,
    0.140653259715525918745,  0.169004726639267902827,  0.190350578064785409913,
    0.204432940075298892414,  0.209482141084727828013,  0.204432940075298892414,
    0.190350578064785409913,  0.169004726639267902827,  0.140653259715525918745,
    0.10479001032225018384,   0.0630920926299785532907, 0.0229353220105292249637,
};
inline constexpr double kGk15WeightsG[7] = {
    0.129484966168869693271, 0.279705391489276667901, 0.38183005050511894495,
    0.417959183673469387755, 0.38183005050511894495,  0.279705391489276667901,
    0.129484966168869693271,
};

struct Segment {
    double a, b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gk15_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double vals[15];
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 15; ++i) {
        vals[i] = f(mid + half * kGk15Nodes[i]);
        resk += kGk15WeightsK[i] * vals[i];
        resabs += kGk15WeightsK[i] * std::fabs(vals[i]);
        if (i % 2 == 1) resg += kGk15WeightsG[i / 2] * vals[i];
    }
    // QUADPACK dqk15 error model: the G-K discrepancy sharpened against the
    // panel roughness resasc = int |f - mean|, with a roundoff floor.
    const double reskh = 0.5 * resk;
    double resasc = 0.0;
    for (int i = 0; i < 15; ++i)
        resasc += kGk15WeightsK[i] * std::fabs(vals[i] - reskh);
    const double hl = std::fabs(half);
    const double value = resk * half;
    double err = std::fabs((resk - resg) * half);
    resasc *= hl;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double round_floor = 50.0 * 2.220446049250313e-16 * resabs * hl;
    return {a, b, value, std::max(err, round_floor)};
}

}  // namespace detail

template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                           double rel_tol = 1e-10, std::size_t max_evals = 1000000) {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::domain_error("integrate: tolerances must be positive");
    if (a == b) return {0.0, 0.0, 0};
    std::priority_queue<detail::Segment> segs;
    std::size_t evals = 15;
    segs.push(detail::gk15_panel(f, a, b));
    double total = segs.top().value;
    double total_err = segs.top().error;
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (evals + 30 > max_evals) {
            throw QuadratureError(
                "integrate: tolerance not met within evaluation budget (achieved "
                "error estimate " + std::to_string(total_err) + ")",
                {total, total_err, evals});
        }
        detail::Segment worst = segs.top();
        segs.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval no longer splittable in double precision
            segs.push(worst);
            throw QuadratureError("integrate: interval exhausted before tolerance",
                                  {total, total_err, evals});
        }
        const auto left = detail::gk15_panel(f, worst.a, mid);
        const auto right = detail::gk15_panel(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        segs.push(left);
        segs.push(right);
    }
    return {total, total_err, evals};
}

}  // namespace epkit
