// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coeff.hpp"
#include "rng.hpp"

namespace lse {

struct Innovation {
    enum class Kind { Gaussian, StudentT, Uniform };

    Kind kind = Kind::Gaussian;
    double df = 0.0;     // StudentT only
    double scale = 1.0;  // sd multiplier for Gaussian/Uniform, scale for StudentT

    /// Draws consumed per innovation index (StudentT uses df+1 normals).
    uint64_t stride() const;
    double draw(const Stream& s, uint64_t idx) const;
    double second_moment() const;
    bool has_moment(double nu) const;

    static Innovation gaussian(double scale = 1.0);
    static Innovation student_t(double df, double scale = 1.0);
    static Innovation uniform(double scale = 1.0);  // Uniform(-sqrt3, sqrt3), unit variance

    /// "gauss" | "t:df" | "uniform", optionally with "@scale" suffix.
    static Innovation parse(std::string_view text);
    std::string str() const;
};

enum class Family { Iid, TvAr1, TvLinearMa, TvArch1 };

const char* family_name(Family f);

struct MaWeights {
    enum class Decay { Poly, Exp };
    Decay decay = Decay::Poly;
    double param = 3.0;  // gamma (>1) or rho (in (0,1))

    double weight(long j) const;  // w_j, j >= 0
    /// Smallest J with sum_{j>J} |w_j| below tol.
    long cutoff(double tol) const;
    double l1_norm() const;
};

/// A validated Bernoulli-shift generator. Construction checks the family's
/// contraction / summability invariants on a 1024-point u-grid.
struct ProcessSpec {
    Family family = Family::Iid;
    CoeffFn coef_a;  // TvAr1: a(u); TvLinearMa: scale s(u); TvArch1: a0(u)
    CoeffFn coef_b;  // TvArch1: a1(u)
    MaWeights ma;
    Innovation innovation;
    long n = 0;  // declared sample size (evaluation horizon for coupling ops)

    static ProcessSpec iid(Innovation innov, long n);
    static ProcessSpec tvar1(CoeffFn a, Innovation innov, long n);
    static ProcessSpec tvlinear_ma(MaWeights w, CoeffFn scale, Innovation innov, long n);
    static ProcessSpec tvarch1(CoeffFn a0, CoeffFn a1, Innovation innov, long n);

    /// Contraction factor of the memory recursion (0 for Iid / LinearMa).
    double contraction() const;
    long default_burnin() const;
    /// Geometric/summable tail bound on the state left from before the burnin
    /// window, per unit of state magnitude.
    double truncation_tail_bound(long burnin) const;
    /// u maximising the dependence-carrying coefficient (grid argmax).
    double worst_u() const;
    bool time_varying() const;

    std::string digest_string() const;
    uint64_t digest() const;
};

struct PathEnsemble {
    enum class Kind { Raw, StationaryAt, CoupledPair };

    Kind kind = Kind::Raw;
    double u = 0.0;  // StationaryAt only
    long lag = 0;    // CoupledPair only
    long reps = 0;
    long n = 0;
    uint64_t seed = 0;
    long burnin = 0;
    /// Row-major [reps x n]; CoupledPair stores 2*reps rows, the first reps
    /// rows are the base paths and row reps+r is the coupled copy of row r.
    std::vector<double> values;

    long rows() const { return kind == Kind::CoupledPair ? 2 * reps : reps; }
    const double* row(long r) const { return values.data() + static_cast<std::size_t>(r) * n; }
    double* row(long r) { return values.data() + static_cast<std::size_t>(r) * n; }
    const double* coupled_row(long r) const { return row(reps + r); }
};

/// X_1..X_n with coefficients evaluated at u = i/n (clamped to 0 before time 1).
PathEnsemble simulate_path(const ProcessSpec& spec, long n, uint64_t seed, long burnin = -1,
                           long reps = 1);
/// Frozen-coefficient companion process at rescaled time u; same innovations
/// as simulate_path for the same (seed, replicate).
PathEnsemble simulate_stationary(const ProcessSpec& spec, double u, long n, uint64_t seed,
                                 long burnin = -1, long reps = 1);
/// Pair of paths whose innovation sequences differ only at index n-k, where
/// the innovation is replaced by an independent copy from the couple stream.
PathEnsemble simulate_coupled_pair(const ProcessSpec& spec, long n, long k, uint64_t seed,
                                   long burnin = -1, long reps = 1);

/// X at a single index of the (optionally coupled / frozen) recursion;
/// used by the dependence-measure estimator to avoid storing paths.
/// swap_at < 1-burnin means "no swap"; frozen_u < 0 means "time-varying".
double value_at(const ProcessSpec& spec, long index, long n, long burnin, const Stream& main,
                const Stream& couple, long swap_at, double frozen_u);

struct LocalStationarityReport {
    std::vector<long> ns;
    std::vector<double> deviation;  // max_i ||X_i - Xtilde_i(i/n)||_{2s} estimates
    double varsigma_hat = 0.0;      // fitted decay exponent
    double varsigma_se = 0.0;
    double c_x_hat = 0.0;
    double moment_order = 2.0;  // the 2s used
};

/// Monte Carlo fit of ||X_i - Xtilde_i(i/n)||_{2s} <= C_X n^{-varsigma}
/// over the ladder {n/8, n/4, n/2, n}.
LocalStationarityReport local_stationarity_check(const ProcessSpec& spec, long n, double s,
                                                 long reps, uint64_t seed);

}  // namespace lse
