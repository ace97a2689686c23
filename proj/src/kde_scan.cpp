// SPDX-License-Identifier: Apache-2.0
#include "kde_scan.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace lse {

namespace {

// Window of time indices with K1((i-j)/(n h1)) possibly nonzero.
inline void window_of(long j, long n, long halfw, long& lo, long& hi) {
    lo = std::max<long>(1, j - halfw);
    hi = std::min<long>(n, j + halfw);
}

}  // namespace

double kde_sup_scan(std::span<const double> path, double h1, double h2, double step,
                    long c_lo, long c_hi, const KernelSpec& xkernel,
                    const KdeSupTarget& target) {
    const long n = static_cast<long>(path.size());
    require(n >= 2, Errc::InvalidArgument, "path too short");
    require(h1 > 0 && h2 > 0 && step > 0, Errc::InvalidArgument,
            "bandwidths and step must be positive");
    require(c_lo <= c_hi, Errc::InvalidArgument, "empty cell range");
    require((target.colfactor != nullptr) != (target.dense != nullptr), Errc::InvalidArgument,
            "exactly one target mode must be set");

    const double m = static_cast<double>(n) * h1;  // time-kernel scale in index units
    const long halfw = static_cast<long>(std::floor(m / 2.0));
    const std::size_t ncells = static_cast<std::size_t>(c_hi - c_lo + 1);
    const double norm = 1.0 / (static_cast<double>(n) * h1 * h2);
    const double inv_m2 = 1.0 / (m * m);

    std::vector<double> s0(ncells, 0.0), s1(ncells, 0.0), s2(ncells, 0.0);
    double t0 = 0, t1 = 0, t2 = 0;  // scalar moments for the weight sum

    // scatter row i into the moment arrays with sign +/-1
    auto apply_row = [&](long i, double sign) {
        double xi = path[i - 1];
        long cf = std::max(c_lo, static_cast<long>(std::ceil((xi - h2 / 2.0) / step)));
        long ct = std::min(c_hi, static_cast<long>(std::floor((xi + h2 / 2.0) / step)));
        double di = static_cast<double>(i);
        for (long c = cf; c <= ct; ++c) {
            double k2 = xkernel((xi - static_cast<double>(c) * step) / h2);
            if (k2 == 0.0) continue;
            std::size_t idx = static_cast<std::size_t>(c - c_lo);
            s0[idx] += sign * k2;
            s1[idx] += sign * (di * k2);
            s2[idx] += sign * (di * di * k2);
        }
        t0 += sign;
        t1 += sign * di;
        t2 += sign * di * di;
    };

    auto rebuild = [&](long j) {
        std::fill(s0.begin(), s0.end(), 0.0);
        std::fill(s1.begin(), s1.end(), 0.0);
        std::fill(s2.begin(), s2.end(), 0.0);
        t0 = t1 = t2 = 0.0;
        long lo, hi;
        window_of(j, n, halfw, lo, hi);
        for (long i = lo; i <= hi; ++i) apply_row(i, 1.0);
    };

    double sup = 0.0;
    long prev_lo = 0, prev_hi = -1;
    const long kRebuildEvery = 2048;
    for (long j = 1; j <= n; ++j) {
        if (j == 1 || (j - 1) % kRebuildEvery == 0) {
            rebuild(j);
        } else {
            long lo, hi;
            window_of(j, n, halfw, lo, hi);
            for (long i = prev_lo; i < lo; ++i) apply_row(i, -1.0);
            for (long i = prev_hi + 1; i <= hi; ++i) apply_row(i, 1.0);
        }
        window_of(j, n, halfw, prev_lo, prev_hi);

        double dj = static_cast<double>(j);
        // K1((i-j)/m) = 1.5 - 6 (i-j)^2 / m^2 expanded in moments of i
        double a = 1.5 - 6.0 * dj * dj * inv_m2;
        double b = 12.0 * dj * inv_m2;
        double g = -6.0 * inv_m2;

        const double* p0 = s0.data();
        const double* p1 = s1.data();
        const double* p2 = s2.data();
        double an = a * norm, bn = b * norm, gn = g * norm;
        double local = 0.0;
        if (target.colfactor != nullptr) {
            double wsum = (a * t0 + b * t1 + g * t2) / m;  // (1/(n h1)) sum K1
            const double* cf = target.colfactor->data();
#pragma omp simd reduction(max : local)
            for (std::size_t c = 0; c < ncells; ++c) {
                double val = an * p0[c] + bn * p1[c] + gn * p2[c];
                double d = std::fabs(val - wsum * cf[c]);
                local = local > d ? local : d;
            }
        } else {
            const double* row = target.dense->data() + static_cast<std::size_t>(j - 1) * ncells;
#pragma omp simd reduction(max : local)
            for (std::size_t c = 0; c < ncells; ++c) {
                double val = an * p0[c] + bn * p1[c] + gn * p2[c];
                double d = std::fabs(val - row[c]);
                local = local > d ? local : d;
            }
        }
        sup = sup > local ? sup : local;
    }
    return sup;
}

}  // namespace lse
