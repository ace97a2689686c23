// SPDX-License-Identifier: Apache-2.0
#include "lse/lse.h"

#include <cstring>
#include <string>

#include "depmeasure.hpp"
#include "estimators.hpp"
#include "experiment.hpp"
#include "io.hpp"
#include "limitlaw.hpp"
#include "process.hpp"
#include "rates.hpp"
#include "util.hpp"

using namespace lse;

struct lse_spec {
    ProcessSpec spec;
};
struct lse_paths {
    PathEnsemble paths;
};
struct lse_profile {
    DependenceProfile profile;
};
struct lse_decay {
    DeltaSeq seq;
};

namespace {

thread_local std::string g_last_error;

lse_status to_status(const Error& e) {
    g_last_error = e.what();
    switch (e.code()) {
        case Errc::InvalidArgument: return LSE_EINVAL;
        case Errc::Domain: return LSE_EDOMAIN;
        case Errc::Io: return LSE_EIO;
        case Errc::Failed: return LSE_EFAILED;
    }
    return LSE_EFAILED;
}

template <typename Fn>
lse_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return LSE_OK;
    } catch (const Error& e) {
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LSE_EFAILED;
    }
}

}  // namespace

extern "C" {

const char* lse_version(void) { return "lse 0.1.0"; }
const char* lse_last_error(void) { return g_last_error.c_str(); }

lse_status lse_spec_create(const char* family, const char* coef, const char* coef2,
                           const char* ma, const char* innovation, long n, lse_spec** out) {
    return guarded([&] {
        require(family && innovation && out, Errc::InvalidArgument, "null argument");
        std::string fam(family);
        auto innov = Innovation::parse(innovation);
        ProcessSpec spec = ProcessSpec::iid(innov, std::max<long>(n, 1));
        if (fam == "iid") {
            spec = ProcessSpec::iid(innov, n);
        } else if (fam == "tvar1") {
            require(coef, Errc::InvalidArgument, "tvar1 needs a coefficient");
            spec = ProcessSpec::tvar1(CoeffFn::parse(coef), innov, n);
        } else if (fam == "tvma") {
            require(ma, Errc::InvalidArgument, "tvma needs a weight decay");
            auto parts = split(ma, ':');
            require(parts.size() == 2 && (parts[0] == "poly" || parts[0] == "exp"),
                    Errc::InvalidArgument, "ma must be poly:gamma or exp:rho");
            MaWeights w;
            w.decay = parts[0] == "poly" ? MaWeights::Decay::Poly : MaWeights::Decay::Exp;
            w.param = parse_double(parts[1], "ma parameter");
            CoeffFn scale = coef ? CoeffFn::parse(coef) : CoeffFn::constant_fn(1.0);
            spec = ProcessSpec::tvlinear_ma(w, scale, innov, n);
        } else if (fam == "tvarch1") {
            require(coef && coef2, Errc::InvalidArgument, "tvarch1 needs a0 and a1");
            spec = ProcessSpec::tvarch1(CoeffFn::parse(coef), CoeffFn::parse(coef2), innov, n);
        } else {
            fail(Errc::InvalidArgument, "unknown family '" + fam + "'");
        }
        *out = new lse_spec{std::move(spec)};
    });
}

void lse_spec_free(lse_spec* spec) { delete spec; }

long lse_spec_default_burnin(const lse_spec* spec) {
    return spec ? spec->spec.default_burnin() : 0;
}

lse_status lse_simulate(const lse_spec* spec, long n, long reps, uint64_t seed, long burnin,
                        lse_paths** out) {
    return guarded([&] {
        require(spec && out, Errc::InvalidArgument, "null argument");
        *out = new lse_paths{simulate_path(spec->spec, n, seed, burnin, reps)};
    });
}

lse_status lse_simulate_stationary(const lse_spec* spec, double u, long n, long reps,
                                   uint64_t seed, long burnin, lse_paths** out) {
    return guarded([&] {
        require(spec && out, Errc::InvalidArgument, "null argument");
        *out = new lse_paths{simulate_stationary(spec->spec, u, n, seed, burnin, reps)};
    });
}

lse_status lse_simulate_coupled(const lse_spec* spec, long n, long k, long reps,
                                uint64_t seed, long burnin, lse_paths** out) {
    return guarded([&] {
        require(spec && out, Errc::InvalidArgument, "null argument");
        *out = new lse_paths{simulate_coupled_pair(spec->spec, n, k, seed, burnin, reps)};
    });
}

long lse_paths_rows(const lse_paths* paths) { return paths ? paths->paths.rows() : 0; }
long lse_paths_cols(const lse_paths* paths) { return paths ? paths->paths.n : 0; }

const double* lse_paths_row(const lse_paths* paths, long row) {
    if (!paths || row < 0 || row >= paths->paths.rows()) return nullptr;
    return paths->paths.row(row);
}

lse_status lse_paths_save_csv(const lse_paths* paths, const char* file) {
    return guarded([&] {
        require(paths && file, Errc::InvalidArgument, "null argument");
        paths_write_csv(paths->paths, file);
    });
}

lse_status lse_paths_save_bin(const lse_paths* paths, const char* file) {
    return guarded([&] {
        require(paths && file, Errc::InvalidArgument, "null argument");
        paths_write_bin(paths->paths, file);
    });
}

lse_status lse_paths_load(const char* file, lse_paths** out) {
    return guarded([&] {
        require(file && out, Errc::InvalidArgument, "null argument");
        *out = new lse_paths{paths_read(file)};
    });
}

void lse_paths_free(lse_paths* paths) { delete paths; }

lse_status lse_local_stationarity(const lse_spec* spec, long n, double s, long reps,
                                  uint64_t seed, double* deviations, double* varsigma,
                                  double* c_x) {
    return guarded([&] {
        require(spec && deviations && varsigma && c_x, Errc::InvalidArgument,
                "null argument");
        auto rep = local_stationarity_check(spec->spec, n, s, reps, seed);
        for (std::size_t i = 0; i < 4 && i < rep.deviation.size(); ++i)
            deviations[i] = rep.deviation[i];
        *varsigma = rep.varsigma_hat;
        *c_x = rep.c_x_hat;
    });
}

lse_status lse_delta_estimate(const lse_spec* spec, long k, double nu, long reps,
                              uint64_t seed, double* delta, double* se) {
    return guarded([&] {
        require(spec && delta && se, Errc::InvalidArgument, "null argument");
        auto est = estimate_delta(spec->spec, k, nu, reps, seed);
        *delta = est.value;
        *se = est.se;
    });
}

lse_status lse_delta_profile(const lse_spec* spec, long kmax, double nu, long reps,
                             uint64_t seed, lse_profile** out) {
    return guarded([&] {
        require(spec && out, Errc::InvalidArgument, "null argument");
        *out = new lse_profile{delta_profile(spec->spec, kmax, nu, reps, seed)};
    });
}

long lse_profile_size(const lse_profile* profile) {
    return profile ? static_cast<long>(profile->profile.lags.size()) : 0;
}

lse_status lse_profile_row(const lse_profile* profile, long i, long* lag, double* delta,
                           double* se) {
    return guarded([&] {
        require(profile && lag && delta && se, Errc::InvalidArgument, "null argument");
        require(i >= 0 && i < lse_profile_size(profile), Errc::InvalidArgument,
                "row index out of range");
        *lag = profile->profile.lags[i];
        *delta = profile->profile.delta_hat[i];
        *se = profile->profile.se[i];
    });
}

lse_status lse_fit_decay(const lse_profile* profile, const char* kind, double* c,
                         double* rate, double* residual, int* independent) {
    return guarded([&] {
        require(profile && kind && c && rate && residual && independent,
                Errc::InvalidArgument, "null argument");
        std::string k(kind);
        DecayModel::Kind mk;
        if (k == "poly")
            mk = DecayModel::Kind::Polynomial;
        else if (k == "exp")
            mk = DecayModel::Kind::Exponential;
        else
            fail(Errc::InvalidArgument, "kind must be poly or exp");
        auto model = fit_decay(profile->profile, mk);
        *c = model.c;
        *rate = model.rate;
        *residual = model.fit_residual;
        *independent = model.independent ? 1 : 0;
    });
}

void lse_profile_free(lse_profile* profile) { delete profile; }

lse_status lse_decay_create(const char* desc, lse_decay** out) {
    return guarded([&] {
        require(desc && out, Errc::InvalidArgument, "null argument");
        *out = new lse_decay{DeltaSeq::parse(desc)};
    });
}

void lse_decay_free(lse_decay* decay) { delete decay; }

lse_status lse_beta(const lse_decay* decay, long q, double* out) {
    return guarded([&] {
        require(decay && out, Errc::InvalidArgument, "null argument");
        *out = decay->seq.beta(q);
    });
}

lse_status lse_q_star(const lse_decay* decay, double x, long* out) {
    return guarded([&] {
        require(decay && out, Errc::InvalidArgument, "null argument");
        *out = q_star(decay->seq, x);
    });
}

lse_status lse_r_of_delta(const lse_decay* decay, double delta, double* out) {
    return guarded([&] {
        require(decay && out, Errc::InvalidArgument, "null argument");
        *out = r_of_delta(decay->seq, delta);
    });
}

lse_status lse_v_norm(const lse_decay* decay, double f2n, double d_n, double* out) {
    return guarded([&] {
        require(decay && out, Errc::InvalidArgument, "null argument");
        *out = v_norm(f2n, decay->seq, d_n);
    });
}

lse_status lse_psi(double eps, double* out) {
    return guarded([&] {
        require(out, Errc::InvalidArgument, "null argument");
        *out = psi(eps);
    });
}

lse_status lse_h_of(long k, double* out) {
    return guarded([&] {
        require(out, Errc::InvalidArgument, "null argument");
        *out = H_of(k);
    });
}

lse_status lse_m_threshold(const lse_decay* decay, long n, double delta_val, long k,
                           double d_n, double d_inf, double* out) {
    return guarded([&] {
        require(decay && out, Errc::InvalidArgument, "null argument");
        WeightProfile w;
        w.D_n = d_n;
        w.D_inf = d_inf;
        w.D_nu_inf = d_inf;
        *out = m_threshold(n, delta_val, k, decay->seq, w);
    });
}

lse_status lse_entropy_indicator(double eps, double l_g, double x_lo, double x_hi,
                                 long* out) {
    return guarded([&] {
        require(out, Errc::InvalidArgument, "null argument");
        *out = entropy_indicator(eps, l_g, x_lo, x_hi);
    });
}

lse_status lse_c_delta(double s, double l0, double c_r, double c_x, double d,
                       double c_fbar, double* out) {
    return guarded([&] {
        require(out, Errc::InvalidArgument, "null argument");
        RateParams params;
        params.s = s;
        params.L = {l0};
        params.C_R = c_r;
        params.C_X = c_x;
        params.d = d;
        *out = c_delta(params, c_fbar);
    });
}

namespace {
RateParams make_params(double s, const double* L, long nl, double c_r, double c_x,
                       double d) {
    RateParams params;
    params.s = s;
    params.L.assign(L, L + nl);
    params.C_R = c_r;
    params.C_X = c_x;
    params.d = d;
    return params;
}
}  // namespace

lse_status lse_delta_bound(const lse_profile* profile, double s, const double* L, long nl,
                           double c_r, double c_x, double d, long k, double* out) {
    return guarded([&] {
        require(profile && L && out && nl >= 1, Errc::InvalidArgument, "null argument");
        *out = delta_bound(profile->profile, make_params(s, L, nl, c_r, c_x, d), k);
    });
}

lse_status lse_delta_bound_model(const char* kind, double c, double rate, double s,
                                 const double* L, long nl, double c_r, double c_x, double d,
                                 long k, double* out) {
    return guarded([&] {
        require(kind && L && out && nl >= 1, Errc::InvalidArgument, "null argument");
        DecayModel model;
        std::string kd(kind);
        if (kd == "poly")
            model.kind = DecayModel::Kind::Polynomial;
        else if (kd == "exp")
            model.kind = DecayModel::Kind::Exponential;
        else
            fail(Errc::InvalidArgument, "kind must be poly or exp");
        model.c = c;
        model.rate = rate;
        *out = delta_bound(model, make_params(s, L, nl, c_r, c_x, d), k);
    });
}

lse_status lse_entropy_integral(lse_entropy_fn entropy, void* ctx, double sigma,
                                int with_psi, double* value, int* divergent) {
    return guarded([&] {
        require(entropy && value && divergent, Errc::InvalidArgument, "null argument");
        auto res = entropy_integral([&](double e) { return entropy(e, ctx); }, sigma,
                                    with_psi != 0);
        *value = res.value;
        *divergent = res.divergent ? 1 : 0;
    });
}

lse_status lse_variance_bound(const lse_decay* decay, double m_bound, double h, long n,
                              double sigma, double c_delta_v, double d_n, double d_inf,
                              long q, double* value, double* qstar_form) {
    return guarded([&] {
        require(decay && value && qstar_form, Errc::InvalidArgument, "null argument");
        BoundParams bp;
        bp.M = m_bound;
        bp.H = h;
        bp.n = n;
        bp.sigma = sigma;
        bp.c_delta = c_delta_v;
        WeightProfile w;
        w.D_n = d_n;
        w.D_inf = d_inf;
        w.D_nu_inf = d_inf;
        auto res = variance_bound(bp, decay->seq, w, q);
        *value = res.value;
        *qstar_form = res.qstar_form;
    });
}

lse_status lse_submult_check(const lse_decay* decay, long qmax, double* c_beta, int* pass) {
    return guarded([&] {
        require(decay && c_beta && pass, Errc::InvalidArgument, "null argument");
        auto rep = submult_check(decay->seq, qmax);
        *c_beta = rep.c_beta;
        *pass = rep.pass ? 1 : 0;
    });
}

lse_status lse_kernel_l2(const char* kernel, double* out) {
    return guarded([&] {
        require(kernel && out, Errc::InvalidArgument, "null argument");
        *out = kernel_l2(KernelSpec::parse(kernel));
    });
}

lse_status lse_edf(const double* data, long n, const double* xs, long nx, double* out) {
    return guarded([&] {
        require(data && xs && out && n >= 1 && nx >= 1, Errc::InvalidArgument,
                "null/empty argument");
        auto res = edf(std::span(data, static_cast<std::size_t>(n)),
                       std::span(xs, static_cast<std::size_t>(nx)));
        std::memcpy(out, res.values.data(), sizeof(double) * res.values.size());
    });
}

lse_status lse_localized_edf(const double* data, long n, const double* xs, long nx,
                             double v, double h, const char* kernel, double* out) {
    return guarded([&] {
        require(data && xs && out && kernel && n >= 1 && nx >= 1, Errc::InvalidArgument,
                "null/empty argument");
        auto res = localized_edf(std::span(data, static_cast<std::size_t>(n)),
                                 std::span(xs, static_cast<std::size_t>(nx)), v, h,
                                 KernelSpec::parse(kernel));
        std::memcpy(out, res.values.data(), sizeof(double) * res.values.size());
    });
}

lse_status lse_kde(const double* data, long n, const double* xs, long nx, const double* vs,
                   long nv, double h1, double h2, const char* kernel, double* out) {
    return guarded([&] {
        require(data && xs && vs && out && kernel && n >= 1 && nx >= 1 && nv >= 1,
                Errc::InvalidArgument, "null/empty argument");
        auto res = kde(std::span(data, static_cast<std::size_t>(n)),
                       std::span(xs, static_cast<std::size_t>(nx)),
                       std::span(vs, static_cast<std::size_t>(nv)), h1, h2,
                       KernelSpec::parse(kernel));
        std::memcpy(out, res.data(), sizeof(double) * res.size());
    });
}

lse_status lse_longrun_cov(const lse_spec* spec, double v, const double* xs, long nx,
                           long pathlen, long lagmax, uint64_t seed, const char* kernel,
                           double* cov, double* se) {
    return guarded([&] {
        require(spec && xs && cov && nx >= 1, Errc::InvalidArgument, "null/empty argument");
        KernelSpec k;
        const KernelSpec* kp = nullptr;
        if (kernel != nullptr) {
            k = KernelSpec::parse(kernel);
            kp = &k;
        }
        auto res = longrun_cov_indicator(spec->spec, v,
                                         std::span(xs, static_cast<std::size_t>(nx)),
                                         pathlen, lagmax, seed, kp);
        std::memcpy(cov, res.matrix.data(), sizeof(double) * res.matrix.size());
        if (se) std::memcpy(se, res.se.data(), sizeof(double) * res.se.size());
    });
}

lse_status lse_longrun_cov_global(const lse_spec* spec, const double* xs, long nx,
                                  long pathlen, long lagmax, uint64_t seed, double* cov,
                                  double* se) {
    return guarded([&] {
        require(spec && xs && cov && nx >= 1, Errc::InvalidArgument, "null/empty argument");
        auto res = longrun_cov_global(spec->spec,
                                      std::span(xs, static_cast<std::size_t>(nx)), pathlen,
                                      lagmax, seed);
        std::memcpy(cov, res.matrix.data(), sizeof(double) * res.matrix.size());
        if (se) std::memcpy(se, res.se.data(), sizeof(double) * res.se.size());
    });
}

lse_status lse_gaussian_limit(const double* cov, long nx, long m, uint64_t seed,
                              double* draws, double* sups) {
    return guarded([&] {
        require(cov && nx >= 1 && m >= 1, Errc::InvalidArgument, "null/empty argument");
        CovarianceEstimate ce;
        ce.xgrid.assign(static_cast<std::size_t>(nx), 0.0);
        for (long i = 0; i < nx; ++i) ce.xgrid[i] = static_cast<double>(i);
        ce.matrix.assign(cov, cov + static_cast<std::size_t>(nx) * nx);
        ce.se.assign(static_cast<std::size_t>(nx) * nx, 0.0);
        auto res = sample_gaussian_limit(ce, m, seed);
        if (draws) std::memcpy(draws, res.draws.data(), sizeof(double) * res.draws.size());
        if (sups)
            std::memcpy(sups, res.sup_stats.data(), sizeof(double) * res.sup_stats.size());
    });
}

lse_status lse_ks_distance(const double* a, long na, const double* b, long nb,
                           double* out) {
    return guarded([&] {
        require(a && b && out && na >= 1 && nb >= 1, Errc::InvalidArgument,
                "null/empty argument");
        *out = ks_distance(std::span(a, static_cast<std::size_t>(na)),
                           std::span(b, static_cast<std::size_t>(nb)));
    });
}

lse_status lse_experiment_run(const char* config_path, const char* out_dir,
                              int* checks_total, int* checks_failed) {
    return guarded([&] {
        require(config_path && out_dir && checks_total && checks_failed,
                Errc::InvalidArgument, "null argument");
        auto cfg = ExperimentConfig::parse_file(config_path);
        auto rep = run_experiment(cfg);
        write_report(rep, out_dir);
        int total = 0, failed = 0;
        for (const auto& c : rep.checks) {
            if (c.informational) continue;
            ++total;
            if (!c.pass) ++failed;
        }
        *checks_total = total;
        *checks_failed = failed;
    });
}

const char* lse_experiment_config_help(void) { return ExperimentConfig::config_help(); }

}  // extern "C"
