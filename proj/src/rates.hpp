// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "depmeasure.hpp"

namespace lse {

/// Constants of the compatibility condition tying the function class to the
/// process moments: Hölder exponent s, weight sequence L, and the (C_R, C_X,
/// d, p) tuple.
struct RateParams {
    double s = 1.0;
    std::vector<double> L = {1.0};
    double C_R = 0.5;
    double C_X = 1.0;
    double d = 1.0;
    double p = std::numeric_limits<double>::infinity();

    void validate() const;
    double l1() const;
    /// Moment order 2sp/(p-1) the dependence measure is taken at (2s at p = inf).
    double moment_order() const;
};

struct WeightProfile {
    double D_n = 1.0;
    double D_inf = 1.0;    // sup-based weight bound
    double D_nu_inf = 1.0; // nu-mean weight bound
    double nu = 2.0;

    void validate() const;
};

struct BoundParams {
    double M = 1.0;      // uniform bound on f
    double H = 1.0;      // 1 v log|F|
    long n = 1;          // sample size
    double sigma = 1.0;  // bound on V_n(f)
    double c_delta = 1.0;
    double universal_c = 1.0;  // report-only placeholder

    void validate() const;
};

/// A summable dependence-decay sequence Delta(k), k >= 1, given explicitly
/// or through a named decay. Construction rejects non-summable inputs.
class DeltaSeq {
public:
    enum class Kind { Explicit, Polynomial, Exponential };

    static DeltaSeq zero();
    static DeltaSeq explicit_seq(std::vector<double> vals);        // Delta(1..K)
    static DeltaSeq polynomial(double c, double alpha);            // c k^-alpha
    static DeltaSeq exponential(double c, double rho);             // c rho^k
    static DeltaSeq from_decay(const DecayModel& model);
    /// "poly:c,alpha" | "exp:c,rho" | "explicit:v1,v2,..."
    static DeltaSeq parse(std::string_view text);

    double delta(long k) const;  // k >= 1
    /// Exact tail sum sum_{j>=q} Delta(j); closed form for named decays
    /// (Hurwitz zeta by Euler-Maclaurin for the polynomial case).
    double beta(long q) const;
    bool is_zero() const;

    Kind kind() const { return kind_; }
    double c() const { return c_; }
    double rate() const { return rate_; }
    std::string str() const;

private:
    Kind kind_ = Kind::Explicit;
    double c_ = 0.0;
    double rate_ = 0.0;
    std::vector<double> vals_;
    std::vector<double> suffix_;  // suffix sums for the explicit case
};

/// Tightest admissible Delta(k): 2 d C_R sum_{j<k} L_j delta(k-j-1)^s.
double delta_bound(const std::function<double(long)>& delta_at, const RateParams& params,
                   long k);
double delta_bound(const DependenceProfile& profile, const RateParams& params, long k);
/// Fitted decay models describe lags k >= 1; lag 0 is evaluated at k = 1.
double delta_bound(const DecayModel& model, const RateParams& params, long k);

/// Smallest q in N with beta(q) <= q*x.
long q_star(const DeltaSeq& delta, double x);

/// max{r > 0 : q*(r) r <= d}, computed exactly from the piece structure of
/// q*; the result is feasible and maximal at any upward perturbation.
double r_of_delta(const DeltaSeq& delta, double d);

/// V_n(f) = ||f||_{2,n} + sum_k min{||f||_{2,n}, D_n Delta(k)}.
double v_norm(double f2n, const DeltaSeq& delta, double D_n);

double psi(double eps);
double H_of(long k);

/// r(delta/D_n) * D_inf * sqrt(n) / sqrt(H(k)).
double m_threshold(long n, double delta_val, long k, const DeltaSeq& delta,
                   const WeightProfile& w);

/// Bracket count for the indicator class over [x_lo, x_hi]: interior grid of
/// mesh eps^2/L_G plus the two unbounded end brackets. eps >= 1 collapses to
/// a single bracket.
long entropy_indicator(double eps, double L_G, double x_lo, double x_hi);

struct EntropyIntegral {
    double value = 0.0;
    bool divergent = false;
    int segments = 0;
};

/// integral_0^sigma [psi(eps)] sqrt(H(eps)) d eps over a geometric
/// subdivision; divergence is detected from non-decaying segment
/// contributions and reported with the partial value.
EntropyIntegral entropy_integral(const std::function<double(double)>& entropy, double sigma,
                                 bool with_psi);

struct VarianceBound {
    double value = 0.0;      // the minimized three-term bound
    long q = 1;              // minimizing block length
    double qstar_form = 0.0; // the q*-substituted variant
};

/// Three-term variance bound with universal constant c = 1, minimized over
/// q in {1..n} unless a block length is supplied (q > 0).
VarianceBound variance_bound(const BoundParams& bp, const DeltaSeq& delta,
                             const WeightProfile& w, long q = 0);

/// 2 max{d, dtilde} |L|_1 C_X^s C_R + C_fbar  (dtilde = 1 here).
double c_delta(const RateParams& params, double C_fbar);

/// Table closed forms (constants omitted), used as sandwich oracles.
double table_qstar_closed(DeltaSeq::Kind kind, double rate, double x);
double table_r_closed(DeltaSeq::Kind kind, double rate, double d);
double table_v_closed(DeltaSeq::Kind kind, double rate, double f2n);

struct SubmultReport {
    double c_beta = 0.0;
    bool pass = true;
    // (Q ladder value, fitted C_beta at that Q)
    std::vector<std::pair<long, double>> ladder;
};

/// Fitted submultiplicativity constant over q1*q2 <= Q with a growth check
/// across a Q-ladder; decays with beta(q1 q2) > 0 = beta(q1) beta(q2) or
/// drifting constants are flagged as failing.
SubmultReport submult_check(const DeltaSeq& delta, long Q);

}  // namespace lse
