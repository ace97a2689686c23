// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "estimators.hpp"

namespace lse {

/// Centering target for the sup scan. Exactly one of the two modes is set:
///  - separable: target(c, j) = weight_sum(j) * colfactor[c - c_lo], where
///    weight_sum(j) = (1/(n h1)) sum_{i in window(j)} K1((i-j)/(n h1));
///  - dense: target(c, j) = dense[(j-1)*ncells + (c - c_lo)].
struct KdeSupTarget {
    const std::vector<double>* colfactor = nullptr;
    const std::vector<double>* dense = nullptr;
};

/// sup over v in {j/n : j = 1..n} and x in {c*step : c_lo <= c <= c_hi} of
/// |ghat(x,v) - target| for the double-kernel density estimate with an
/// Epanechnikov time kernel. The quadratic time kernel turns the window sum
/// into three sliding moments, so one full v-sweep costs O(n_v * n_cells)
/// instead of O(n_v * window * n_cells). Sums are rebuilt periodically to
/// keep incremental roundoff far below the statistic's scale.
///
/// The x-direction kernel is evaluated exactly per observation, so any
/// registered kernel works there.
double kde_sup_scan(std::span<const double> path, double h1, double h2, double step,
                    long c_lo, long c_hi, const KernelSpec& xkernel,
                    const KdeSupTarget& target);

}  // namespace lse
