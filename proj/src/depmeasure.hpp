// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "process.hpp"

namespace lse {

struct DeltaEstimate {
    double value = 0.0;
    double se = 0.0;       // bootstrap standard error (200 resamples)
    long eval_index = 0;   // index realizing the reported estimate
};

struct DependenceProfile {
    double nu = 2.0;
    std::vector<long> lags;
    std::vector<double> delta_hat;
    std::vector<double> se;
    long reps = 0;
    uint64_t spec_digest = 0;
};

struct DecayModel {
    enum class Kind { Polynomial, Exponential };
    Kind kind = Kind::Polynomial;
    double c = 0.0;
    double rate = 0.0;  // alpha (poly) or rho (exp)
    long fit_lo = 0, fit_hi = 0;
    double fit_residual = 0.0;  // max |log delta - log fit|
    bool independent = false;   // all-zero profile

    double eval(long k) const;
};

/// Coupled-path Monte Carlo estimate of the uniform functional dependence
/// measure at lag k. The sup over time indices is approximated by evaluating
/// at i = n and at the grid argmax of the dependence-carrying coefficient,
/// reporting the larger estimate.
DeltaEstimate estimate_delta(const ProcessSpec& spec, long k, double nu, long reps,
                             uint64_t seed);

DependenceProfile delta_profile(const ProcessSpec& spec, long kmax, double nu, long reps,
                                uint64_t seed);

/// Least squares in log scale over lags k >= 1, dropping estimates below the
/// 3*SE noise floor.
DecayModel fit_decay(const DependenceProfile& profile, DecayModel::Kind kind);

}  // namespace lse
