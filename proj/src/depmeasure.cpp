// SPDX-License-Identifier: Apache-2.0
#include "depmeasure.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace lse {

namespace {

constexpr int kBootstrapResamples = 200;

inline uint64_t eps_ctr(long i) {
    return i >= 1 ? 2 * static_cast<uint64_t>(i - 1) : 2 * static_cast<uint64_t>(-i) + 1;
}

inline double clamp01(double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }

// |X_index - X*_index|^nu for every requested lag in one pass per replicate.
// The main recursion runs once; each coupled copy branches from the stored
// state just before its swap position and replays the ring-buffered
// innovations, which reproduces the full coupled recursion bit for bit.
void coupled_powers_multi(const ProcessSpec& spec, long index, const std::vector<long>& lags,
                          double nu, long reps, uint64_t seed, long burnin,
                          std::vector<std::vector<double>>& out) {
    const long kmax = *std::max_element(lags.begin(), lags.end());
    const long ring = kmax + 2;
    const long n = spec.n;
    const long start = 1 - burnin;

    out.assign(lags.size(), std::vector<double>(static_cast<std::size_t>(reps), 0.0));

    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        Stream main(seed, r, StreamRole::Innovation);
        Stream couple(seed, r, StreamRole::Couple);
        const Innovation& innov = spec.innovation;
        auto u_of = [&](long i) { return clamp01(static_cast<double>(i) / n); };

        std::vector<double> eps_ring(static_cast<std::size_t>(ring), 0.0);
        std::vector<double> state_ring(static_cast<std::size_t>(ring), 0.0);
        auto slot = [&](long i) {
            return static_cast<std::size_t>(((i % ring) + ring) % ring);
        };

        double x_main = 0.0;
        double ma_acc = 0.0;
        long jmax = 0;
        switch (spec.family) {
            case Family::Iid: {
                eps_ring[slot(index)] = innov.draw(main, eps_ctr(index));
                x_main = eps_ring[slot(index)];
                break;
            }
            case Family::TvAr1:
            case Family::TvArch1: {
                double x = 0.0;
                for (long i = start; i <= index; ++i) {
                    double e = innov.draw(main, eps_ctr(i));
                    double u = u_of(i);
                    if (spec.family == Family::TvAr1)
                        x = spec.coef_a(u) * x + e;
                    else
                        x = std::sqrt(spec.coef_a(u) + spec.coef_b(u) * x * x) * e;
                    eps_ring[slot(i)] = e;
                    state_ring[slot(i)] = x;
                }
                x_main = x;
                break;
            }
            case Family::TvLinearMa: {
                jmax = std::min(spec.ma.cutoff(1e-8), index - start);
                double acc = 0.0;
                for (long j = 0; j <= jmax; ++j) {
                    double e = innov.draw(main, eps_ctr(index - j));
                    if (j <= kmax) eps_ring[slot(index - j)] = e;
                    acc += spec.ma.weight(j) * e;
                }
                ma_acc = acc;
                x_main = spec.coef_a(u_of(index)) * acc;
                break;
            }
        }

        for (std::size_t li = 0; li < lags.size(); ++li) {
            long k = lags[li];
            long swap = index - k;
            double diff = 0.0;
            if (swap < start) {
                diff = 0.0;  // the swapped innovation predates the truncated past
            } else {
                switch (spec.family) {
                    case Family::Iid:
                        diff = k == 0 ? eps_ring[slot(index)] -
                                            innov.draw(couple, eps_ctr(index))
                                      : 0.0;
                        break;
                    case Family::TvAr1:
                    case Family::TvArch1: {
                        double x = swap - 1 >= start ? state_ring[slot(swap - 1)] : 0.0;
                        double e_star = innov.draw(couple, eps_ctr(swap));
                        for (long i = swap; i <= index; ++i) {
                            double e = i == swap ? e_star : eps_ring[slot(i)];
                            double u = u_of(i);
                            if (spec.family == Family::TvAr1)
                                x = spec.coef_a(u) * x + e;
                            else
                                x = std::sqrt(spec.coef_a(u) + spec.coef_b(u) * x * x) * e;
                        }
                        diff = x_main - x;
                        break;
                    }
                    case Family::TvLinearMa: {
                        if (k > jmax) {
                            diff = 0.0;
                        } else {
                            double e_star = innov.draw(couple, eps_ctr(swap));
                            double acc_star =
                                ma_acc + spec.ma.weight(k) * (e_star - eps_ring[slot(swap)]);
                            diff = x_main - spec.coef_a(u_of(index)) * acc_star;
                        }
                        break;
                    }
                }
            }
            out[li][r] = std::pow(std::fabs(diff), nu);
        }
    });
}

double root_mean(const std::vector<double>& pow_values, double nu) {
    return std::pow(mean(pow_values), 1.0 / nu);
}

double bootstrap_se(const std::vector<double>& pow_values, double nu, uint64_t seed) {
    Stream bs(seed, 0, StreamRole::Bootstrap);
    std::size_t m = pow_values.size();
    std::vector<double> stats(kBootstrapResamples);
    uint64_t idx = 0;
    for (int b = 0; b < kBootstrapResamples; ++b) {
        double acc = 0;
        for (std::size_t t = 0; t < m; ++t) {
            auto pick = static_cast<std::size_t>(bs.bits(idx++) % m);
            acc += pow_values[pick];
        }
        stats[b] = std::pow(acc / static_cast<double>(m), 1.0 / nu);
    }
    return std::sqrt(variance(stats));
}

// Candidate evaluation indices realizing the sup over time: i = n, plus the
// grid argmax of the dependence-carrying coefficient for time-varying specs.
std::vector<long> candidate_indices(const ProcessSpec& spec) {
    std::vector<long> candidates = {spec.n};
    if (spec.time_varying()) {
        long i2 = std::clamp<long>(std::lround(spec.worst_u() * spec.n), 1, spec.n);
        if (i2 != spec.n) candidates.push_back(i2);
    }
    return candidates;
}

void validate_delta_args(const ProcessSpec& spec, long k, double nu, long reps) {
    require(k >= 0, Errc::InvalidArgument, "lag k must be >= 0");
    require(nu > 0, Errc::InvalidArgument, "moment order nu must be positive");
    require(reps >= 100, Errc::InvalidArgument, "need reps >= 100");
    require(spec.innovation.has_moment(nu), Errc::Domain,
            "innovation lacks the moment of order " + format_double(nu) +
                " (StudentT df must exceed nu)");
    require(k <= spec.n + spec.default_burnin(), Errc::InvalidArgument,
            "lag k exceeds the available past");
}

}  // namespace

DeltaEstimate estimate_delta(const ProcessSpec& spec, long k, double nu, long reps,
                             uint64_t seed) {
    validate_delta_args(spec, k, nu, reps);
    long burnin = spec.default_burnin();

    DeltaEstimate best;
    best.value = -1.0;
    std::vector<std::vector<double>> powers;
    for (long idx : candidate_indices(spec)) {
        coupled_powers_multi(spec, idx, {k}, nu, reps, seed, burnin, powers);
        double est = root_mean(powers[0], nu);
        if (est > best.value) {
            best.value = est;
            best.eval_index = idx;
            best.se = bootstrap_se(powers[0], nu, seed);
        }
    }
    return best;
}

DependenceProfile delta_profile(const ProcessSpec& spec, long kmax, double nu, long reps,
                                uint64_t seed) {
    require(kmax >= 1, Errc::InvalidArgument, "kmax must be >= 1");
    validate_delta_args(spec, kmax, nu, reps);
    long burnin = spec.default_burnin();

    std::vector<long> lags(static_cast<std::size_t>(kmax) + 1);
    for (long k = 0; k <= kmax; ++k) lags[k] = k;

    auto candidates = candidate_indices(spec);
    std::vector<std::vector<std::vector<double>>> powers(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c)
        coupled_powers_multi(spec, candidates[c], lags, nu, reps, seed, burnin, powers[c]);

    DependenceProfile p;
    p.nu = nu;
    p.reps = reps;
    p.spec_digest = spec.digest();
    for (long k = 0; k <= kmax; ++k) {
        std::size_t best_c = 0;
        double best = -1.0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            double est = root_mean(powers[c][k], nu);
            if (est > best) {
                best = est;
                best_c = c;
            }
        }
        p.lags.push_back(k);
        p.delta_hat.push_back(best);
        p.se.push_back(bootstrap_se(powers[best_c][k], nu, seed));
    }
    return p;
}

double DecayModel::eval(long k) const {
    if (independent) return 0.0;
    return kind == Kind::Polynomial ? c * std::pow(static_cast<double>(k), -rate)
                                    : c * std::pow(rate, static_cast<double>(k));
}

DecayModel fit_decay(const DependenceProfile& profile, DecayModel::Kind kind) {
    std::vector<double> xs, ys;
    long lo = 0, hi = 0;
    for (std::size_t t = 0; t < profile.lags.size(); ++t) {
        long k = profile.lags[t];
        double d = profile.delta_hat[t];
        if (k < 1) continue;
        if (d <= 0 || d < 3.0 * profile.se[t]) continue;  // noise floor
        double x = kind == DecayModel::Kind::Polynomial ? std::log(static_cast<double>(k))
                                                        : static_cast<double>(k);
        xs.push_back(x);
        ys.push_back(std::log(d));
        if (lo == 0) lo = k;
        hi = k;
    }
    if (xs.empty()) {
        bool all_zero = true;
        for (std::size_t t = 0; t < profile.lags.size(); ++t)
            if (profile.lags[t] >= 1 && profile.delta_hat[t] > 0) all_zero = false;
        if (all_zero) {
            DecayModel m;
            m.kind = kind;
            m.independent = true;
            return m;
        }
    }
    require(xs.size() >= 4, Errc::Failed,
            "need at least 4 positive estimates above the noise floor to fit a decay model");

    std::size_t m = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t t = 0; t < m; ++t) {
        sx += xs[t];
        sy += ys[t];
        sxx += xs[t] * xs[t];
        sxy += xs[t] * ys[t];
    }
    double denom = m * sxx - sx * sx;
    require(std::fabs(denom) > 1e-12, Errc::Failed, "decay fit is ill-conditioned");
    double slope = (m * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / m;

    DecayModel model;
    model.kind = kind;
    model.fit_lo = lo;
    model.fit_hi = hi;
    if (kind == DecayModel::Kind::Polynomial) {
        model.c = std::exp(intercept);
        model.rate = -slope;
    } else {
        model.c = std::exp(intercept);
        model.rate = std::exp(slope);
    }
    double res = 0;
    for (std::size_t t = 0; t < m; ++t)
        res = std::max(res, std::fabs(ys[t] - (intercept + slope * xs[t])));
    model.fit_residual = res;

    if (kind == DecayModel::Kind::Polynomial)
        require(model.rate > 1.0, Errc::Failed,
                "fitted polynomial exponent " + format_double(model.rate) +
                    " is not summable (needs alpha > 1); max log-residual " +
                    format_double(res));
    else
        require(model.rate > 0.0 && model.rate < 1.0, Errc::Failed,
                "fitted exponential rate " + format_double(model.rate) +
                    " is outside (0,1); max log-residual " + format_double(res));
    return model;
}

}  // namespace lse
