// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace lse {

/// Kernel on support [-1/2, 1/2] with unit integral. Rectangular is not
/// Lipschitz and is excluded from runs that require a Lipschitz kernel.
struct KernelSpec {
    enum class Name { Rectangular, Triangular, Epanechnikov };

    Name name = Name::Epanechnikov;
    double lipschitz = 0.0;  // 0 marks the non-Lipschitz rectangular kernel
    double l2norm = 1.0;     // integral of K^2
    double peak = 1.0;       // |K|_inf

    double operator()(double u) const;
    bool is_lipschitz() const { return lipschitz > 0.0; }

    static KernelSpec get(Name name);
    static KernelSpec parse(std::string_view text);  // "rect"|"tri"|"epan"
    const char* str() const;
};

/// Exact integral of K^2 (closed form for the built-ins).
double kernel_l2(const KernelSpec& kernel);

struct EmpiricalProcessSample {
    std::vector<double> xgrid;
    std::vector<double> values;
    long n = 0;
    double h = 0.0;
    double v = -1.0;       // rescaled time for localized variants
    double scaling = 1.0;  // the sqrt(n) or sqrt(nh) factor callers apply
};

/// Plain EDF: counts/n via binary search over the sorted sample.
EmpiricalProcessSample edf(std::span<const double> path, std::span<const double> xgrid);

/// (1/(nh)) sum_i K((i/n - v)/h) 1{X_i <= x}. Interior v only: v must lie in
/// [h/2, 1-h/2] so the kernel window stays inside (0,1).
EmpiricalProcessSample localized_edf(std::span<const double> path,
                                     std::span<const double> xgrid, double v, double h,
                                     const KernelSpec& kernel);

/// Localized kernel density estimate on the (vgrid x xgrid) product, row-major
/// by v: (1/n) sum_i K_h1(i/n - v) K_h2(X_i - x), with window pruning.
std::vector<double> kde(std::span<const double> path, std::span<const double> xgrid,
                        std::span<const double> vgrid, double h1, double h2,
                        const KernelSpec& kernel);

}  // namespace lse
