// SPDX-License-Identifier: Apache-2.0
#include "rates.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace lse {

namespace {

constexpr double kE = 2.7182818284590452353602874713527;

/// Hurwitz zeta sum_{j>=0} (a+j)^{-s} for s > 1, a >= 1, by Euler-Maclaurin.
/// Absolute error is far below 1e-13 for the arguments used here.
double hurwitz_zeta(double s, double a) {
    const int N = 32;
    double sum = 0.0;
    for (int j = 0; j < N; ++j) sum += std::pow(a + j, -s);
    double an = a + N;
    sum += std::pow(an, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(an, -s);
    // B_{2k}/(2k)! * (s)_{2k-1} * an^{-s-2k+1}
    static const double coef[4] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
    double rising = s;  // (s)_1
    double pw = std::pow(an, -s - 1.0);
    double an2 = an * an;
    for (int k = 0; k < 4; ++k) {
        sum += coef[k] * rising * pw;
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2);
        pw /= an2;
    }
    return sum;
}

}  // namespace

void RateParams::validate() const {
    require(s > 0.0 && s <= 1.0, Errc::InvalidArgument, "s must lie in (0,1]");
    require(p > 1.0, Errc::InvalidArgument, "p must exceed 1");
    require(C_R >= 0.0 && C_X >= 0.0 && d >= 1.0, Errc::InvalidArgument,
            "C_R, C_X must be nonnegative and d >= 1");
    for (double l : L)
        require(l >= 0.0, Errc::InvalidArgument, "weights L_j must be nonnegative");
}

double RateParams::l1() const {
    double acc = 0;
    for (double l : L) acc += l;
    return acc;
}

double RateParams::moment_order() const {
    if (std::isinf(p)) return 2.0 * s;
    return 2.0 * s * p / (p - 1.0);
}

void WeightProfile::validate() const {
    require(D_n >= 0.0 && D_inf >= 0.0 && D_nu_inf >= 0.0, Errc::InvalidArgument,
            "weight bounds must be nonnegative");
    require(D_n <= D_inf * (1.0 + 1e-12), Errc::InvalidArgument,
            "D_n must not exceed D_inf for weights from a common family");
}

void BoundParams::validate() const {
    require(M > 0 && H > 0 && n >= 1 && sigma > 0 && c_delta > 0 && universal_c > 0,
            Errc::InvalidArgument, "bound parameters must be positive");
}

DeltaSeq DeltaSeq::zero() { return explicit_seq({}); }

DeltaSeq DeltaSeq::explicit_seq(std::vector<double> vals) {
    for (double v : vals)
        require(v >= 0.0, Errc::InvalidArgument, "Delta(k) must be nonnegative");
    DeltaSeq d;
    d.kind_ = Kind::Explicit;
    d.vals_ = std::move(vals);
    d.suffix_.assign(d.vals_.size() + 1, 0.0);
    for (std::size_t i = d.vals_.size(); i-- > 0;)
        d.suffix_[i] = d.suffix_[i + 1] + d.vals_[i];
    return d;
}

DeltaSeq DeltaSeq::polynomial(double c, double alpha) {
    require(c >= 0.0, Errc::InvalidArgument, "c must be nonnegative");
    require(alpha > 1.0, Errc::InvalidArgument,
            "polynomial decay needs alpha > 1 for summability");
    DeltaSeq d;
    d.kind_ = Kind::Polynomial;
    d.c_ = c;
    d.rate_ = alpha;
    return d;
}

DeltaSeq DeltaSeq::exponential(double c, double rho) {
    require(c >= 0.0, Errc::InvalidArgument, "c must be nonnegative");
    require(rho > 0.0 && rho < 1.0, Errc::InvalidArgument,
            "exponential decay needs rho in (0,1)");
    DeltaSeq d;
    d.kind_ = Kind::Exponential;
    d.c_ = c;
    d.rate_ = rho;
    return d;
}

DeltaSeq DeltaSeq::from_decay(const DecayModel& model) {
    if (model.independent) return zero();
    return model.kind == DecayModel::Kind::Polynomial ? polynomial(model.c, model.rate)
                                                      : exponential(model.c, model.rate);
}

DeltaSeq DeltaSeq::parse(std::string_view text) {
    auto pos = text.find(':');
    require(pos != std::string_view::npos, Errc::InvalidArgument,
            "decay must look like poly:c,alpha | exp:c,rho | explicit:v1,v2,...");
    std::string kind(text.substr(0, pos));
    auto args = split(text.substr(pos + 1), ',');
    if (kind == "poly") {
        require(args.size() == 2, Errc::InvalidArgument, "poly decay takes c,alpha");
        return polynomial(parse_double(args[0], "c"), parse_double(args[1], "alpha"));
    }
    if (kind == "exp") {
        require(args.size() == 2, Errc::InvalidArgument, "exp decay takes c,rho");
        return exponential(parse_double(args[0], "c"), parse_double(args[1], "rho"));
    }
    if (kind == "explicit") {
        std::vector<double> vals;
        for (const auto& a : args)
            if (!a.empty()) vals.push_back(parse_double(a, "Delta value"));
        return explicit_seq(std::move(vals));
    }
    fail(Errc::InvalidArgument, "unknown decay kind '" + kind + "'");
}

double DeltaSeq::delta(long k) const {
    require(k >= 1, Errc::InvalidArgument, "Delta(k) is defined for k >= 1");
    switch (kind_) {
        case Kind::Explicit:
            return static_cast<std::size_t>(k) <= vals_.size() ? vals_[k - 1] : 0.0;
        case Kind::Polynomial: return c_ * std::pow(static_cast<double>(k), -rate_);
        case Kind::Exponential: return c_ * std::pow(rate_, static_cast<double>(k));
    }
    return 0.0;
}

double DeltaSeq::beta(long q) const {
    require(q >= 1, Errc::InvalidArgument, "beta(q) is defined for q >= 1");
    switch (kind_) {
        case Kind::Explicit:
            return static_cast<std::size_t>(q) <= vals_.size() ? suffix_[q - 1] : 0.0;
        case Kind::Polynomial:
            return c_ == 0.0 ? 0.0 : c_ * hurwitz_zeta(rate_, static_cast<double>(q));
        case Kind::Exponential:
            return c_ * std::pow(rate_, static_cast<double>(q)) / (1.0 - rate_);
    }
    return 0.0;
}

bool DeltaSeq::is_zero() const {
    if (kind_ == Kind::Explicit) return vals_.empty() || suffix_[0] == 0.0;
    return c_ == 0.0;
}

std::string DeltaSeq::str() const {
    switch (kind_) {
        case Kind::Polynomial:
            return "poly:" + format_double(c_) + "," + format_double(rate_);
        case Kind::Exponential:
            return "exp:" + format_double(c_) + "," + format_double(rate_);
        case Kind::Explicit: {
            std::string s = "explicit:";
            for (std::size_t i = 0; i < vals_.size(); ++i) {
                if (i) s += ",";
                s += format_double(vals_[i]);
            }
            return s;
        }
    }
    return "";
}

double delta_bound(const std::function<double(long)>& delta_at, const RateParams& params,
                   long k) {
    params.validate();
    require(k >= 1, Errc::InvalidArgument, "Delta(k) is defined for k >= 1");
    double acc = 0;
    for (long j = 0; j < k && static_cast<std::size_t>(j) < params.L.size(); ++j) {
        if (params.L[j] == 0.0) continue;
        acc += params.L[j] * std::pow(delta_at(k - j - 1), params.s);
    }
    return 2.0 * params.d * params.C_R * acc;
}

double delta_bound(const DependenceProfile& profile, const RateParams& params, long k) {
    auto at = [&](long lag) {
        for (std::size_t t = 0; t < profile.lags.size(); ++t)
            if (profile.lags[t] == lag) return profile.delta_hat[t];
        fail(Errc::InvalidArgument,
             "profile is missing lag " + std::to_string(lag) + " needed for Delta(" +
                 std::to_string(k) + ")");
    };
    return delta_bound(at, params, k);
}

double delta_bound(const DecayModel& model, const RateParams& params, long k) {
    auto at = [&](long lag) { return model.eval(std::max<long>(lag, 1)); };
    return delta_bound(at, params, k);
}

long q_star(const DeltaSeq& delta, double x) {
    require(x > 0.0, Errc::InvalidArgument, "q* needs x > 0");
    auto feasible = [&](long q) { return delta.beta(q) <= static_cast<double>(q) * x; };
    if (feasible(1)) return 1;
    long lo = 1, hi = 2;
    while (!feasible(hi)) {
        lo = hi;
        require(hi < (1L << 61), Errc::Failed, "q* search overflow");
        hi *= 2;
    }
    while (hi - lo > 1) {
        long mid = lo + (hi - lo) / 2;
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double r_of_delta(const DeltaSeq& delta, double d) {
    require(d > 0.0, Errc::InvalidArgument, "r(delta) needs delta > 0");
    if (delta.beta(1) <= d) return d;
    // qbar = min{q : beta(q) <= d}; the feasible set's supremum lies in the
    // q*-piece [beta(qbar)/qbar, beta(qbar-1)/(qbar-1)).
    long lo = 1, hi = 2;
    while (delta.beta(hi) > d) {
        lo = hi;
        require(hi < (1L << 61), Errc::Failed, "r(delta) search overflow");
        hi *= 2;
    }
    while (hi - lo > 1) {
        long mid = lo + (hi - lo) / 2;
        if (delta.beta(mid) <= d)
            hi = mid;
        else
            lo = mid;
    }
    long qbar = hi;
    double qb = static_cast<double>(qbar);
    double r = std::min(d / qb, std::nexttoward(delta.beta(qbar - 1) / (qb - 1.0), 0.0L));
    r = std::max(r, delta.beta(qbar) / qb);
    // guard against one-ulp edge cases at piece boundaries
    for (int guard = 0; guard < 8 && static_cast<double>(q_star(delta, r)) * r > d; ++guard)
        r = std::nexttoward(r, 0.0L);
    return r;
}

double v_norm(double f2n, const DeltaSeq& delta, double D_n) {
    require(f2n >= 0.0, Errc::InvalidArgument, "||f||_{2,n} must be nonnegative");
    require(D_n >= 0.0, Errc::InvalidArgument, "D_n must be nonnegative");
    if (f2n == 0.0) return 0.0;
    if (delta.is_zero() || D_n == 0.0) return f2n;

    if (delta.kind() == DeltaSeq::Kind::Explicit) {
        double acc = f2n;
        long K = 1;
        while (delta.delta(K) > 0 || delta.beta(K) > 0) {
            acc += std::min(f2n, D_n * delta.delta(K));
            ++K;
        }
        return acc;
    }

    // Named decays are monotone: beyond K* = min{k : D_n Delta(k) <= f2n}
    // the min switches permanently to the summable branch.
    double thr = f2n / D_n;
    long k0;
    if (delta.kind() == DeltaSeq::Kind::Polynomial)
        k0 = delta.c() <= thr
                 ? 1
                 : static_cast<long>(std::ceil(std::pow(delta.c() / thr, 1.0 / delta.rate())));
    else
        k0 = delta.c() * delta.rate() <= thr
                 ? 1
                 : static_cast<long>(std::ceil(std::log(thr / delta.c()) /
                                               std::log(delta.rate())));
    k0 = std::max<long>(k0, 1);
    while (k0 > 1 && D_n * delta.delta(k0 - 1) <= f2n) --k0;
    while (D_n * delta.delta(k0) > f2n) ++k0;
    return f2n * static_cast<double>(k0) + D_n * delta.beta(k0);
}

double psi(double eps) {
    require(eps > 0.0, Errc::InvalidArgument, "psi needs eps > 0");
    double inv = 1.0 / eps;
    return std::sqrt(std::log(std::max(inv, 1.0))) * std::log(std::log(std::max(inv, kE)));
}

double H_of(long k) {
    require(k >= 1, Errc::InvalidArgument, "H(k) needs k >= 1");
    return std::max(1.0, std::log(static_cast<double>(k)));
}

double m_threshold(long n, double delta_val, long k, const DeltaSeq& delta,
                   const WeightProfile& w) {
    w.validate();
    require(n >= 1, Errc::InvalidArgument, "m(n,delta,k) needs n >= 1");
    require(k >= 1, Errc::InvalidArgument, "m(n,delta,k) needs k >= 1");
    require(delta_val > 0.0, Errc::InvalidArgument, "m(n,delta,k) needs delta > 0");
    require(w.D_n > 0.0, Errc::InvalidArgument, "m(n,delta,k) needs D_n > 0");
    return r_of_delta(delta, delta_val / w.D_n) * w.D_inf * std::sqrt(static_cast<double>(n)) /
           std::sqrt(H_of(k));
}

long entropy_indicator(double eps, double L_G, double x_lo, double x_hi) {
    require(eps > 0.0, Errc::InvalidArgument, "eps must be positive");
    require(L_G >= 0.0, Errc::InvalidArgument, "L_G must be nonnegative");
    require(x_lo <= x_hi, Errc::InvalidArgument, "need x_lo <= x_hi");
    if (eps >= 1.0) return 1;  // whole class in a single bracket
    double interior = std::ceil((x_hi - x_lo) * L_G / (eps * eps));
    return 1 + static_cast<long>(interior) + 2;
}

EntropyIntegral entropy_integral(const std::function<double(double)>& entropy, double sigma,
                                 bool with_psi) {
    require(sigma > 0.0, Errc::InvalidArgument, "sigma must be positive");

    // the entropy must be nonincreasing in eps
    double prev = entropy(sigma);
    for (int m = 1; m <= 40; ++m) {
        double e = sigma * std::pow(0.5, m);
        double cur = entropy(e);
        require(cur >= prev * (1.0 - 1e-9) - 1e-12, Errc::InvalidArgument,
                "entropy input is not nonincreasing in eps");
        prev = cur;
    }

    auto integrand = [&](double e) {
        double h = entropy(e);
        require(h >= 0.0, Errc::InvalidArgument, "entropy must be nonnegative");
        double v = std::sqrt(h);
        return with_psi ? psi(e) * v : v;
    };

    // adaptive Simpson on one segment
    std::function<double(double, double, double, double, double, double, int)> simp =
        [&](double a, double b, double fa, double fm, double fb, double whole,
            int depth) -> double {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = integrand(lm), frm = integrand(rm);
        double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (depth <= 0 || std::fabs(left + right - whole) <=
                              1e-10 * (std::fabs(left + right) + 1e-300))
            return left + right;
        return simp(a, m, fa, flm, fm, left, depth - 1) +
               simp(m, b, fm, frm, fb, right, depth - 1);
    };
    auto segment = [&](double a, double b) {
        double fa = integrand(a), fb = integrand(b), fm = integrand(0.5 * (a + b));
        double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return simp(a, b, fa, fm, fb, whole, 24);
    };

    EntropyIntegral out;
    double total = 0.0;
    std::vector<double> contribs;
    const int kMaxSegments = 600;
    int m = 0;
    for (; m < kMaxSegments; ++m) {
        double hi = sigma * std::pow(0.5, m);
        double lo = 0.5 * hi;
        double contrib = segment(lo, hi);
        total += contrib;
        contribs.push_back(contrib);
        // A convergent integrand has geometrically decaying segment
        // contributions; a sustained flat/growing profile means the
        // singularity at 0 is not integrable. Near-critical exponents are
        // classified conservatively.
        if (m >= 48 && contribs[m - 16] > 0.0) {
            double ratio16 = std::pow(contrib / contribs[m - 16], 1.0 / 16.0);
            if (ratio16 >= 0.9995) {
                out.value = total;
                out.divergent = true;
                out.segments = m + 1;
                return out;
            }
        }
        if (m >= 20 && contrib <= 1e-9 * std::max(total, 1e-300)) break;
    }
    out.value = total;
    out.divergent = (m >= kMaxSegments);
    out.segments = m + 1;
    return out;
}

VarianceBound variance_bound(const BoundParams& bp, const DeltaSeq& delta,
                             const WeightProfile& w, long q) {
    bp.validate();
    w.validate();
    require(w.D_n > 0.0, Errc::InvalidArgument, "variance bound needs D_n > 0");
    double head = w.D_n * r_of_delta(delta, bp.sigma / w.D_n) * bp.sigma;
    double tail_coef = bp.M * bp.M * bp.H / static_cast<double>(bp.n);
    double beta_coef = bp.c_delta * w.D_inf * w.D_inf;
    auto value_at = [&](long qq) {
        return bp.universal_c *
               (head + beta_coef * delta.beta(qq) + static_cast<double>(qq) * tail_coef);
    };

    VarianceBound out;
    if (q > 0) {
        require(q <= bp.n, Errc::InvalidArgument, "q must lie in {1..n}");
        out.q = q;
        out.value = value_at(q);
    } else if (delta.kind() == DeltaSeq::Kind::Explicit) {
        long K = 1;
        while (delta.beta(K) > 0.0) ++K;  // beta vanishes beyond the support
        long hi = std::min(bp.n, K);
        out.q = 1;
        out.value = value_at(1);
        for (long qq = 2; qq <= hi; ++qq) {
            double v = value_at(qq);
            if (v < out.value) {
                out.value = v;
                out.q = qq;
            }
        }
    } else {
        // beta is convex for monotone decays, so the objective is convex in q
        long lo = 1, hi = bp.n;
        while (hi - lo > 2) {
            long m1 = lo + (hi - lo) / 3;
            long m2 = hi - (hi - lo) / 3;
            if (value_at(m1) <= value_at(m2))
                hi = m2;
            else
                lo = m1;
        }
        out.q = lo;
        out.value = value_at(lo);
        for (long qq = lo + 1; qq <= hi; ++qq) {
            double v = value_at(qq);
            if (v < out.value) {
                out.value = v;
                out.q = qq;
            }
        }
    }

    double x = tail_coef / beta_coef;
    out.qstar_form =
        bp.universal_c * (head + static_cast<double>(q_star(delta, x)) * tail_coef);
    return out;
}

double c_delta(const RateParams& params, double C_fbar) {
    params.validate();
    require(C_fbar >= 0.0, Errc::InvalidArgument, "C_fbar must be nonnegative");
    double dmax = std::max(params.d, 1.0);
    return 2.0 * dmax * params.l1() * std::pow(params.C_X, params.s) * params.C_R + C_fbar;
}

double table_qstar_closed(DeltaSeq::Kind kind, double rate, double x) {
    require(x > 0.0, Errc::InvalidArgument, "x must be positive");
    if (kind == DeltaSeq::Kind::Polynomial) return std::max(std::pow(x, -1.0 / rate), 1.0);
    if (kind == DeltaSeq::Kind::Exponential) return std::max(std::log(1.0 / x), 1.0);
    return 1.0;
}

double table_r_closed(DeltaSeq::Kind kind, double rate, double d) {
    require(d > 0.0, Errc::InvalidArgument, "delta must be positive");
    if (kind == DeltaSeq::Kind::Polynomial)
        return std::min(std::pow(d, rate / (rate - 1.0)), d);
    if (kind == DeltaSeq::Kind::Exponential) return std::min(d / std::log(1.0 / d), d);
    return d;
}

double table_v_closed(DeltaSeq::Kind kind, double rate, double f2n) {
    require(f2n > 0.0, Errc::InvalidArgument, "||f||_{2,n} must be positive");
    if (kind == DeltaSeq::Kind::Polynomial)
        return f2n * std::max(std::pow(f2n, -1.0 / rate), 1.0);
    if (kind == DeltaSeq::Kind::Exponential)
        return f2n * std::max(std::log(1.0 / f2n), 1.0);
    return f2n;
}

SubmultReport submult_check(const DeltaSeq& delta, long Q) {
    require(Q >= 4, Errc::InvalidArgument, "submultiplicativity check needs Q >= 4");
    SubmultReport rep;
    auto fit_at = [&](long cap, bool& zero_violation) {
        double worst = 0.0;
        zero_violation = false;
        for (long q1 = 1; q1 * q1 <= cap; ++q1) {
            double b1 = delta.beta(q1);
            for (long q2 = q1; q1 * q2 <= cap; ++q2) {
                double b2 = delta.beta(q2);
                double num = delta.beta(q1 * q2);
                double den = b1 * b2;
                if (den == 0.0) {
                    if (num > 0.0) zero_violation = true;
                    continue;
                }
                worst = std::max(worst, num / den);
            }
        }
        return worst;
    };

    bool zero_violation = false;
    for (long cap = 4; cap < Q; cap *= 2) {
        bool zv = false;
        rep.ladder.emplace_back(cap, fit_at(cap, zv));
        zero_violation = zero_violation || zv;
    }
    bool zv = false;
    rep.ladder.emplace_back(Q, fit_at(Q, zv));
    zero_violation = zero_violation || zv;
    rep.c_beta = rep.ladder.back().second;

    if (zero_violation) {
        rep.pass = false;
        rep.c_beta = std::numeric_limits<double>::infinity();
        return rep;
    }
    // drifting C_beta across the Q-ladder signals unboundedness
    std::size_t m = rep.ladder.size();
    if (m >= 4) {
        bool increasing = true;
        for (std::size_t t = m - 3; t < m; ++t)
            if (rep.ladder[t].second <= rep.ladder[t - 1].second * (1.0 + 1e-9))
                increasing = false;
        std::size_t base = m >= 5 ? m - 5 : 0;
        double growth = rep.ladder[base].second > 0
                            ? rep.ladder.back().second / rep.ladder[base].second
                            : 1.0;
        if (increasing && growth > 1.25) rep.pass = false;
    }
    return rep;
}

}  // namespace lse
