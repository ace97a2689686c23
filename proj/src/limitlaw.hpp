// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "estimators.hpp"
#include "process.hpp"

namespace lse {

struct CovarianceEstimate {
    std::vector<double> xgrid;
    std::vector<double> matrix;  // nx * nx row-major, exactly symmetric
    std::vector<double> se;      // per-entry standard error (block estimate)
    long lagmax = 0;
    long pathlen = 0;
    double kernel_factor = 1.0;  // integral K^2 applied (1 for the plain EDF case)

    double at(std::size_t i, std::size_t j) const { return matrix[i * xgrid.size() + j]; }
    double se_at(std::size_t i, std::size_t j) const { return se[i * xgrid.size() + j]; }
};

/// Bartlett lag-window long-run covariance of the indicator vector
/// (1{X_i <= x})_x along a long path of the stationary approximation at v.
/// lagmax < 0 selects ceil(pathlen^{1/3}); a kernel multiplies every entry
/// by its integral of K^2 (the localized limit).
CovarianceEstimate longrun_cov_indicator(const ProcessSpec& spec, double v,
                                         std::span<const double> xgrid, long pathlen,
                                         long lagmax, uint64_t seed,
                                         const KernelSpec* kernel = nullptr);

/// Time-integrated covariance: per-u long-run covariances averaged over a
/// 64-point u-grid (the global-normalization limit for unweighted classes).
CovarianceEstimate longrun_cov_global(const ProcessSpec& spec, std::span<const double> xgrid,
                                      long pathlen, long lagmax, uint64_t seed);

struct GaussianLimitSample {
    std::vector<double> draws;      // M x nx row-major
    std::vector<double> sup_stats;  // per-draw sup_x |G(x)|
    double chol_jitter = 0.0;
    long m = 0;
    std::size_t dim = 0;
};

/// Centered Gaussian draws from the (jitter-regularized) covariance matrix.
GaussianLimitSample sample_gaussian_limit(const CovarianceEstimate& cov, long m,
                                          uint64_t seed);

/// Two-sample Kolmogorov-Smirnov statistic in [0,1].
double ks_distance(std::span<const double> a, std::span<const double> b);

}  // namespace lse
