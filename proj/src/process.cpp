// SPDX-License-Identifier: Apache-2.0
#include "process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "util.hpp"

namespace lse {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935274463415059;

inline double clamp01(double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }
}  // namespace

uint64_t Innovation::stride() const {
    return kind == Kind::StudentT ? static_cast<uint64_t>(df) + 1 : 1;
}

double Innovation::draw(const Stream& s, uint64_t idx) const {
    switch (kind) {
        case Kind::Gaussian: return scale * s.normal(idx);
        case Kind::Uniform: return scale * kSqrt3 * (2.0 * s.uniform(idx) - 1.0);
        case Kind::StudentT: {
            uint64_t base = idx * stride();
            double z = s.normal(base);
            double chi2 = 0.0;
            long d = static_cast<long>(df);
            for (long j = 1; j <= d; ++j) {
                double w = s.normal(base + static_cast<uint64_t>(j));
                chi2 += w * w;
            }
            return scale * z / std::sqrt(chi2 / df);
        }
    }
    return 0.0;
}

double Innovation::second_moment() const {
    switch (kind) {
        case Kind::Gaussian:
        case Kind::Uniform: return scale * scale;
        case Kind::StudentT: return scale * scale * df / (df - 2.0);
    }
    return 0.0;
}

bool Innovation::has_moment(double nu) const {
    return kind != Kind::StudentT || nu < df;
}

Innovation Innovation::gaussian(double scale) { return {Kind::Gaussian, 0.0, scale}; }

Innovation Innovation::student_t(double df, double scale) {
    require(df == std::floor(df) && df >= 3 && df <= 200, Errc::InvalidArgument,
            "StudentT df must be an integer in [3, 200]");
    return {Kind::StudentT, df, scale};
}

Innovation Innovation::uniform(double scale) { return {Kind::Uniform, 0.0, scale}; }

Innovation Innovation::parse(std::string_view text) {
    double scale = 1.0;
    auto at = text.find('@');
    if (at != std::string_view::npos) {
        scale = parse_double(text.substr(at + 1), "innovation scale");
        require(scale > 0, Errc::InvalidArgument, "innovation scale must be positive");
        text = text.substr(0, at);
    }
    if (text == "gauss" || text == "gaussian") return gaussian(scale);
    if (text == "uniform") return uniform(scale);
    if (text.substr(0, 2) == "t:")
        return student_t(parse_double(text.substr(2), "StudentT df"), scale);
    fail(Errc::InvalidArgument, "unknown innovation '" + std::string(text) + "'");
}

std::string Innovation::str() const {
    std::string base;
    switch (kind) {
        case Kind::Gaussian: base = "gauss"; break;
        case Kind::Uniform: base = "uniform"; break;
        case Kind::StudentT: base = "t:" + format_double(df); break;
    }
    if (scale != 1.0) base += "@" + format_double(scale);
    return base;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Iid: return "iid";
        case Family::TvAr1: return "tvar1";
        case Family::TvLinearMa: return "tvma";
        case Family::TvArch1: return "tvarch1";
    }
    return "?";
}

double MaWeights::weight(long j) const {
    return decay == Decay::Poly ? std::pow(static_cast<double>(j + 1), -param)
                                : std::pow(param, static_cast<double>(j));
}

long MaWeights::cutoff(double tol) const {
    if (decay == Decay::Exp) {
        // rho^{J+1}/(1-rho) < tol
        long j = static_cast<long>(std::ceil(std::log(tol * (1.0 - param)) / std::log(param)));
        return std::max<long>(j, 1);
    }
    // sum_{j>J} (j+1)^{-g} <= J^{1-g}/(g-1) < tol
    double g = param;
    long j = static_cast<long>(std::ceil(std::pow(tol * (g - 1.0), -1.0 / (g - 1.0))));
    return std::max<long>(j, 1);
}

double MaWeights::l1_norm() const {
    long cut = cutoff(1e-14);
    double s = 0;
    for (long j = 0; j <= cut; ++j) s += std::fabs(weight(j));
    return s;
}

ProcessSpec ProcessSpec::iid(Innovation innov, long n) {
    require(n >= 1, Errc::InvalidArgument, "sample size n must be >= 1");
    ProcessSpec s;
    s.family = Family::Iid;
    s.innovation = innov;
    s.n = n;
    return s;
}

ProcessSpec ProcessSpec::tvar1(CoeffFn a, Innovation innov, long n) {
    require(n >= 1, Errc::InvalidArgument, "sample size n must be >= 1");
    double abar = a.max_abs();
    require(abar < 1.0, Errc::InvalidArgument,
            "TvAR1 coefficient is not contractive: sup|a(u)| = " + format_double(abar));
    ProcessSpec s;
    s.family = Family::TvAr1;
    s.coef_a = a;
    s.innovation = innov;
    s.n = n;
    return s;
}

ProcessSpec ProcessSpec::tvlinear_ma(MaWeights w, CoeffFn scale, Innovation innov, long n) {
    require(n >= 1, Errc::InvalidArgument, "sample size n must be >= 1");
    if (w.decay == MaWeights::Decay::Poly)
        require(w.param > 1.0, Errc::InvalidArgument,
                "TvLinearMA polynomial decay needs exponent > 1 for summability");
    else
        require(w.param > 0.0 && w.param < 1.0, Errc::InvalidArgument,
                "TvLinearMA exponential decay needs rho in (0,1)");
    ProcessSpec s;
    s.family = Family::TvLinearMa;
    s.ma = w;
    s.coef_a = scale;
    s.innovation = innov;
    s.n = n;
    return s;
}

ProcessSpec ProcessSpec::tvarch1(CoeffFn a0, CoeffFn a1, Innovation innov, long n) {
    require(n >= 1, Errc::InvalidArgument, "sample size n must be >= 1");
    require(a0.min_value() > 0.0, Errc::InvalidArgument, "TvARCH1 needs inf_u a0(u) > 0");
    require(a1.min_value() >= 0.0, Errc::InvalidArgument, "TvARCH1 needs a1(u) >= 0");
    double c = a1.max_value() * innov.second_moment();
    require(c < 1.0, Errc::InvalidArgument,
            "TvARCH1 second-moment recursion is not contractive: sup a1(u)*E[eps^2] = " +
                format_double(c));
    ProcessSpec s;
    s.family = Family::TvArch1;
    s.coef_a = a0;
    s.coef_b = a1;
    s.innovation = innov;
    s.n = n;
    return s;
}

double ProcessSpec::contraction() const {
    switch (family) {
        case Family::TvAr1: return coef_a.max_abs();
        case Family::TvArch1: return coef_b.max_value() * innovation.second_moment();
        default: return 0.0;
    }
}

long ProcessSpec::default_burnin() const {
    switch (family) {
        case Family::Iid: return 0;
        case Family::TvLinearMa: return ma.cutoff(1e-8);
        case Family::TvAr1:
        case Family::TvArch1: {
            double c = contraction();
            if (c <= 0.0) return 1000;
            long k = static_cast<long>(std::ceil(std::log(1e-12) / std::log(c)));
            return std::max<long>(1000, k);
        }
    }
    return 1000;
}

double ProcessSpec::truncation_tail_bound(long burnin) const {
    switch (family) {
        case Family::Iid: return 0.0;
        case Family::TvAr1: return std::pow(contraction(), static_cast<double>(burnin));
        case Family::TvArch1:
            return std::pow(std::sqrt(contraction()), static_cast<double>(burnin));
        case Family::TvLinearMa: {
            double tail = 0;
            long cut = ma.cutoff(1e-14);
            for (long j = burnin + 1; j <= cut; ++j) tail += std::fabs(ma.weight(j));
            return tail * coef_a.max_abs();
        }
    }
    return 0.0;
}

double ProcessSpec::worst_u() const {
    switch (family) {
        case Family::Iid: return 1.0;
        case Family::TvAr1:
        case Family::TvLinearMa: return coef_a.argmax_abs();
        case Family::TvArch1: return coef_b.argmax_abs();
    }
    return 1.0;
}

bool ProcessSpec::time_varying() const {
    switch (family) {
        case Family::Iid: return false;
        case Family::TvAr1:
        case Family::TvLinearMa: return !coef_a.constant();
        case Family::TvArch1: return !coef_a.constant() || !coef_b.constant();
    }
    return false;
}

std::string ProcessSpec::digest_string() const {
    std::string s = family_name(family);
    s += "|" + coef_a.str();
    if (family == Family::TvArch1) s += "|" + coef_b.str();
    if (family == Family::TvLinearMa)
        s += std::string("|") + (ma.decay == MaWeights::Decay::Poly ? "poly:" : "exp:") +
             format_double(ma.param);
    s += "|" + innovation.str() + "|n=" + std::to_string(n);
    return s;
}

uint64_t ProcessSpec::digest() const { return fnv1a64(digest_string()); }

namespace {

// Innovation sequence over absolute time indices, backed by the
// counter-based stream. The zig-zag index map keeps draws independent of the
// burnin choice (time i >= 1 maps to even counters, presamples to odd), so
// enlarging the window never changes already-drawn innovations. The optional
// swap substitutes the independent copy at a single index.
inline uint64_t eps_counter(long i) {
    return i >= 1 ? 2 * static_cast<uint64_t>(i - 1) : 2 * static_cast<uint64_t>(-i) + 1;
}

struct EpsSeq {
    const Innovation* innov;
    const Stream* main;
    const Stream* couple = nullptr;
    long swap_at = 0;
    long first = 0;  // 1 - burnin, the earliest available index

    double operator()(long i) const {
        uint64_t idx = eps_counter(i);
        if (couple != nullptr && i == swap_at) return innov->draw(*couple, idx);
        return innov->draw(*main, idx);
    }
};

// Writes X_1..X_n; frozen_u >= 0 freezes every coefficient at u = frozen_u.
void run_path(const ProcessSpec& spec, long n, long burnin, const EpsSeq& eps, double frozen_u,
              double* out) {
    auto u_of = [&](long i) {
        return frozen_u >= 0.0 ? frozen_u : clamp01(static_cast<double>(i) / n);
    };
    long start = 1 - burnin;
    switch (spec.family) {
        case Family::Iid: {
            for (long i = 1; i <= n; ++i) out[i - 1] = eps(i);
            return;
        }
        case Family::TvAr1: {
            double x = 0.0;
            for (long i = start; i <= n; ++i) {
                x = spec.coef_a(u_of(i)) * x + eps(i);
                if (i >= 1) out[i - 1] = x;
            }
            return;
        }
        case Family::TvArch1: {
            double x = 0.0;
            for (long i = start; i <= n; ++i) {
                double u = u_of(i);
                double s2 = spec.coef_a(u) + spec.coef_b(u) * x * x;
                x = std::sqrt(s2) * eps(i);
                if (i >= 1) out[i - 1] = x;
            }
            return;
        }
        case Family::TvLinearMa: {
            long jmax = std::min(spec.ma.cutoff(1e-8), burnin);
            std::vector<double> w(static_cast<std::size_t>(jmax) + 1);
            for (long j = 0; j <= jmax; ++j) w[j] = spec.ma.weight(j);
            for (long i = 1; i <= n; ++i) {
                long jhi = std::min(jmax, i - start);
                double acc = 0.0;
                for (long j = 0; j <= jhi; ++j) acc += w[j] * eps(i - j);
                out[i - 1] = spec.coef_a(u_of(i)) * acc;
            }
            return;
        }
    }
}

long resolve_burnin(const ProcessSpec& spec, long burnin) {
    if (burnin < 0) return spec.default_burnin();
    return burnin;
}

PathEnsemble make_ensemble(PathEnsemble::Kind kind, long reps, long n, uint64_t seed,
                           long burnin) {
    PathEnsemble e;
    e.kind = kind;
    e.reps = reps;
    e.n = n;
    e.seed = seed;
    e.burnin = burnin;
    e.values.assign(static_cast<std::size_t>(kind == PathEnsemble::Kind::CoupledPair ? 2 * reps
                                                                                     : reps) *
                        n,
                    0.0);
    return e;
}

}  // namespace

PathEnsemble simulate_path(const ProcessSpec& spec, long n, uint64_t seed, long burnin,
                           long reps) {
    require(n >= 1, Errc::InvalidArgument, "n must be >= 1");
    require(reps >= 1, Errc::InvalidArgument, "reps must be >= 1");
    burnin = resolve_burnin(spec, burnin);
    auto out = make_ensemble(PathEnsemble::Kind::Raw, reps, n, seed, burnin);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        Stream main(seed, r, StreamRole::Innovation);
        EpsSeq eps{&spec.innovation, &main, nullptr, 0, 1 - burnin};
        run_path(spec, n, burnin, eps, -1.0, out.row(static_cast<long>(r)));
    });
    return out;
}

PathEnsemble simulate_stationary(const ProcessSpec& spec, double u, long n, uint64_t seed,
                                 long burnin, long reps) {
    require(u >= 0.0 && u <= 1.0, Errc::InvalidArgument, "u must lie in [0,1]");
    require(n >= 1, Errc::InvalidArgument, "n must be >= 1");
    require(reps >= 1, Errc::InvalidArgument, "reps must be >= 1");
    burnin = resolve_burnin(spec, burnin);
    auto out = make_ensemble(PathEnsemble::Kind::StationaryAt, reps, n, seed, burnin);
    out.u = u;
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        Stream main(seed, r, StreamRole::Innovation);
        EpsSeq eps{&spec.innovation, &main, nullptr, 0, 1 - burnin};
        run_path(spec, n, burnin, eps, u, out.row(static_cast<long>(r)));
    });
    return out;
}

PathEnsemble simulate_coupled_pair(const ProcessSpec& spec, long n, long k, uint64_t seed,
                                   long burnin, long reps) {
    require(n >= 1, Errc::InvalidArgument, "n must be >= 1");
    require(k >= 0, Errc::InvalidArgument, "lag k must be >= 0");
    require(reps >= 1, Errc::InvalidArgument, "reps must be >= 1");
    burnin = resolve_burnin(spec, burnin);
    require(k <= n + burnin, Errc::InvalidArgument,
            "lag k = " + std::to_string(k) + " exceeds the available past n + burnin = " +
                std::to_string(n + burnin));
    auto out = make_ensemble(PathEnsemble::Kind::CoupledPair, reps, n, seed, burnin);
    out.lag = k;
    long swap_at = n - k;
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        Stream main(seed, r, StreamRole::Innovation);
        Stream couple(seed, r, StreamRole::Couple);
        EpsSeq eps{&spec.innovation, &main, nullptr, 0, 1 - burnin};
        run_path(spec, n, burnin, eps, -1.0, out.row(static_cast<long>(r)));
        EpsSeq eps_star{&spec.innovation, &main, &couple, swap_at, 1 - burnin};
        run_path(spec, n, burnin, eps_star, -1.0, out.row(out.reps + static_cast<long>(r)));
    });
    return out;
}

double value_at(const ProcessSpec& spec, long index, long n, long burnin, const Stream& main,
                const Stream& couple, long swap_at, double frozen_u) {
    EpsSeq eps{&spec.innovation, &main, swap_at >= 1 - burnin ? &couple : nullptr, swap_at,
               1 - burnin};
    auto u_of = [&](long i) {
        return frozen_u >= 0.0 ? frozen_u : clamp01(static_cast<double>(i) / n);
    };
    switch (spec.family) {
        case Family::Iid: return eps(index);
        case Family::TvAr1: {
            double x = 0.0;
            for (long i = 1 - burnin; i <= index; ++i) x = spec.coef_a(u_of(i)) * x + eps(i);
            return x;
        }
        case Family::TvArch1: {
            double x = 0.0;
            for (long i = 1 - burnin; i <= index; ++i) {
                double u = u_of(i);
                x = std::sqrt(spec.coef_a(u) + spec.coef_b(u) * x * x) * eps(i);
            }
            return x;
        }
        case Family::TvLinearMa: {
            long jmax = std::min(spec.ma.cutoff(1e-8), index - (1 - burnin));
            double acc = 0.0;
            for (long j = 0; j <= jmax; ++j) acc += spec.ma.weight(j) * eps(index - j);
            return spec.coef_a(u_of(index)) * acc;
        }
    }
    return 0.0;
}

LocalStationarityReport local_stationarity_check(const ProcessSpec& spec, long n, double s,
                                                 long reps, uint64_t seed) {
    require(n >= 16, Errc::InvalidArgument, "need n >= 16 for the ladder");
    require(reps >= 10, Errc::InvalidArgument, "need reps >= 10");
    require(s > 0.0, Errc::InvalidArgument, "moment exponent s must be positive");
    require(spec.innovation.has_moment(2.0 * s), Errc::Domain,
            "innovation lacks the required moment of order " + format_double(2.0 * s));

    LocalStationarityReport rep;
    rep.moment_order = 2.0 * s;
    rep.ns = {n / 8, n / 4, n / 2, n};
    long burnin = spec.default_burnin();
    constexpr int kIdxGrid = 16;

    for (long nl : rep.ns) {
        std::vector<long> idx;
        for (int t = 1; t <= kIdxGrid; ++t)
            idx.push_back(std::max<long>(1, (nl * t) / kIdxGrid));
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

        // per-replicate accumulation of |X_i - Xtilde_i(i/n)|^{2s}
        std::vector<std::vector<double>> acc(static_cast<std::size_t>(reps),
                                             std::vector<double>(idx.size(), 0.0));
        parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
            Stream main(seed, r, StreamRole::Innovation);
            EpsSeq eps{&spec.innovation, &main, nullptr, 0, 1 - burnin};
            // one shared innovation buffer serves both recursions
            std::vector<double> buf(static_cast<std::size_t>(nl + burnin));
            for (long i = 1 - burnin; i <= nl; ++i)
                buf[static_cast<std::size_t>(i - (1 - burnin))] = eps(i);
            auto eval = [&](long target, double frozen) {
                double x = 0.0;
                switch (spec.family) {
                    case Family::Iid:
                        return buf[static_cast<std::size_t>(target - (1 - burnin))];
                    case Family::TvAr1:
                        for (long i = 1 - burnin; i <= target; ++i) {
                            double u = frozen >= 0 ? frozen
                                                   : clamp01(static_cast<double>(i) / nl);
                            x = spec.coef_a(u) * x +
                                buf[static_cast<std::size_t>(i - (1 - burnin))];
                        }
                        return x;
                    case Family::TvArch1:
                        for (long i = 1 - burnin; i <= target; ++i) {
                            double u = frozen >= 0 ? frozen
                                                   : clamp01(static_cast<double>(i) / nl);
                            x = std::sqrt(spec.coef_a(u) + spec.coef_b(u) * x * x) *
                                buf[static_cast<std::size_t>(i - (1 - burnin))];
                        }
                        return x;
                    case Family::TvLinearMa: {
                        long jmax = std::min(spec.ma.cutoff(1e-8), target - (1 - burnin));
                        double a = 0.0;
                        for (long j = 0; j <= jmax; ++j)
                            a += spec.ma.weight(j) *
                                 buf[static_cast<std::size_t>(target - j - (1 - burnin))];
                        double u = frozen >= 0
                                       ? frozen
                                       : clamp01(static_cast<double>(target) / nl);
                        return spec.coef_a(u) * a;
                    }
                }
                return 0.0;
            };
            for (std::size_t t = 0; t < idx.size(); ++t) {
                long i = idx[t];
                double d = eval(i, -1.0) - eval(i, static_cast<double>(i) / nl);
                acc[r][t] = std::pow(std::fabs(d), 2.0 * s);
            }
        });

        double worst = 0.0;
        for (std::size_t t = 0; t < idx.size(); ++t) {
            double m = 0.0;
            for (long r = 0; r < reps; ++r) m += acc[static_cast<std::size_t>(r)][t];
            m /= static_cast<double>(reps);
            worst = std::max(worst, std::pow(m, 1.0 / (2.0 * s)));
        }
        rep.deviation.push_back(worst);
    }

    // log-log fit of deviation ~ C_X n^{-varsigma}
    bool all_zero = true;
    for (double d : rep.deviation)
        if (d > 0) all_zero = false;
    if (all_zero) {
        rep.varsigma_hat = std::numeric_limits<double>::infinity();
        rep.c_x_hat = 0.0;
        return rep;
    }
    std::size_t m = rep.ns.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t t = 0; t < m; ++t) {
        double x = std::log(static_cast<double>(rep.ns[t]));
        double y = std::log(rep.deviation[t]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / m;
    rep.varsigma_hat = -slope;
    rep.c_x_hat = std::exp(intercept);
    double rss = 0;
    for (std::size_t t = 0; t < m; ++t) {
        double x = std::log(static_cast<double>(rep.ns[t]));
        double y = std::log(rep.deviation[t]);
        double e = y - (intercept + slope * x);
        rss += e * e;
    }
    rep.varsigma_se = std::sqrt(rss / std::max<std::size_t>(1, m - 2) / (sxx - sx * sx / m));
    return rep;
}

}  // namespace lse
