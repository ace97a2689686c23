// SPDX-License-Identifier: Apache-2.0
//
// lse command line: simulation, dependence estimation, rate calculus,
// estimators, limit-law utilities and the experiment harness, all through
// the public C API.

#include <lse/lse.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int die(lse_status st) {
    std::cerr << "error: " << lse_last_error() << "\n";
    return st == LSE_EINVAL || st == LSE_EIO ? 2 : 1;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct SpecArgs {
    std::string family = "iid";
    std::string coef = "const:0.5";
    std::string coef2 = "const:0.1";
    std::string ma = "poly:3";
    std::string innovation = "gauss";
    long n = 1000;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family, "iid | tvar1 | tvma | tvarch1");
        cmd->add_option("--coef", coef, "coefficient: const:c | affine:a,b | sine:a,b,f");
        cmd->add_option("--coef2", coef2, "second coefficient (ARCH a1)");
        cmd->add_option("--ma", ma, "MA weight decay: poly:gamma | exp:rho");
        cmd->add_option("--innovation", innovation, "gauss | t:df | uniform (@scale suffix)");
        cmd->add_option("-n,--n", n, "sample size");
    }
    lse_spec* make() const {
        lse_spec* spec = nullptr;
        if (lse_spec_create(family.c_str(), coef.c_str(), coef2.c_str(), ma.c_str(),
                            innovation.c_str(), n, &spec) != LSE_OK)
            return nullptr;
        return spec;
    }
};

std::vector<double> parse_points(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

// entropy callbacks for the rates subcommand
struct EntropyCtx {
    int kind = 0;  // 0 const, 1 log, 2 pow, 3 cor26
    double param = 1.0;
};

double entropy_cb(double eps, void* ctx) {
    auto* c = static_cast<EntropyCtx*>(ctx);
    switch (c->kind) {
        case 0: return c->param;
        case 1: return std::log(1.0 / eps);
        case 2: return std::pow(eps, -c->param);
        case 3: {
            // squared integrand of the stationary-EDF entropy condition:
            // eps^{-2/(alpha s)} * log(1/eps)
            double as = c->param;
            return std::pow(eps, -2.0 / as) * std::log(1.0 / eps);
        }
    }
    return 0.0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lse: empirical processes of locally stationary time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lse_version());

    // ---------------- simulate ----------------
    auto* sim = app.add_subcommand("simulate", "generate process paths");
    SpecArgs sim_spec;
    sim_spec.attach(sim);
    long sim_reps = 1, sim_burnin = -1, couple_k = -1;
    uint64_t sim_seed = 1;
    double stationary_u = -1.0;
    std::string sim_out = "paths.csv";
    bool sim_bin = false;
    sim->add_option("--reps", sim_reps, "replicates");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--burnin", sim_burnin, "presamples (-1 = default)");
    sim->add_option("--stationary-u", stationary_u,
                    "simulate the frozen-coefficient process at this rescaled time");
    sim->add_option("--couple-k", couple_k, "simulate a coupled pair with this lag");
    sim->add_option("-o,--out", sim_out, "output file");
    sim->add_flag("--bin", sim_bin, "write the LSE1 binary matrix format");

    // ---------------- depmeasure ----------------
    auto* dep = app.add_subcommand("depmeasure", "estimate the dependence measure");
    SpecArgs dep_spec;
    dep_spec.attach(dep);
    long dep_kmax = 8, dep_reps = 10000;
    double dep_nu = 2.0;
    uint64_t dep_seed = 1;
    std::string dep_fit;
    dep->add_option("--kmax", dep_kmax, "largest lag");
    dep->add_option("--nu", dep_nu, "moment order");
    dep->add_option("--reps", dep_reps, "Monte Carlo replicates");
    dep->add_option("--seed", dep_seed, "master seed");
    dep->add_option("--fit", dep_fit, "also fit a decay model: poly | exp");

    // ---------------- rates ----------------
    auto* rates = app.add_subcommand("rates", "deterministic rate calculus");
    std::string rates_decay = "poly:1,2", rates_op = "beta", rates_args;
    std::string rates_entropy = "log";
    double rates_dn = 1.0, rates_dinf = 1.0;
    bool rates_with_psi = false;
    rates->add_option("--decay", rates_decay,
                      "poly:c,alpha | exp:c,rho | explicit:file.csv | explicit:v1,v2,...");
    rates->add_option("--op", rates_op,
                      "beta | qstar | r | vnorm | psi | h | m | entropy | bracket | bound | "
                      "submult | cdelta");
    rates->add_option("--args", rates_args, "comma-separated operation arguments");
    rates->add_option("--entropy", rates_entropy, "const:c | log | pow:p | cor26:alpha_s");
    rates->add_flag("--with-psi", rates_with_psi, "include the psi factor in the integral");
    rates->add_option("--dn", rates_dn, "weight bound D_n");
    rates->add_option("--dinf", rates_dinf, "weight bound D_n^inf");

    // ---------------- edf ----------------
    auto* edf_cmd = app.add_subcommand("edf", "empirical distribution function");
    std::string edf_in, edf_x = "linspace:-3,3,61", edf_kernel = "epan";
    long edf_rep = 0;
    double edf_v = -1.0, edf_h = 0.0;
    edf_cmd->add_option("-i,--in", edf_in, "path file (CSV or LSE1)")->required();
    edf_cmd->add_option("--x", edf_x, "x grid: v1,v2,... or linspace:lo,hi,count");
    edf_cmd->add_option("--replicate", edf_rep, "replicate row to use");
    edf_cmd->add_option("--v", edf_v, "rescaled time (localized variant)");
    edf_cmd->add_option("--bandwidth", edf_h, "bandwidth (localized variant)");
    edf_cmd->add_option("--kernel", edf_kernel, "rect | tri | epan");

    // ---------------- kde ----------------
    auto* kde_cmd = app.add_subcommand("kde", "localized kernel density estimate");
    std::string kde_in, kde_x = "linspace:-3,3,61", kde_v = "0.5", kde_kernel = "epan";
    long kde_rep = 0;
    double kde_h1 = 0.1, kde_h2 = 0.1;
    kde_cmd->add_option("-i,--in", kde_in, "path file (CSV or LSE1)")->required();
    kde_cmd->add_option("--x", kde_x, "x grid");
    kde_cmd->add_option("--v", kde_v, "v grid");
    kde_cmd->add_option("--replicate", kde_rep, "replicate row to use");
    kde_cmd->add_option("--h1", kde_h1, "time bandwidth");
    kde_cmd->add_option("--h2", kde_h2, "space bandwidth");
    kde_cmd->add_option("--kernel", kde_kernel, "rect | tri | epan");

    // ---------------- limit ----------------
    auto* limit = app.add_subcommand("limit", "long-run covariance and Gaussian limit");
    SpecArgs limit_spec;
    limit_spec.attach(limit);
    double limit_v = 0.5;
    std::string limit_x = "-1,0,1", limit_kernel;
    long limit_pathlen = 200000, limit_lagmax = -1, limit_draws = 0;
    uint64_t limit_seed = 1;
    bool limit_global = false;
    std::string limit_cov_out = "cov.csv", limit_sup_out = "sups.csv";
    limit->add_option("--v", limit_v, "rescaled time of the stationary approximation");
    limit->add_option("--x", limit_x, "x grid");
    limit->add_option("--pathlen", limit_pathlen, "simulated path length");
    limit->add_option("--lagmax", limit_lagmax, "Bartlett window (-1 = pathlen^{1/3})");
    limit->add_option("--seed", limit_seed, "master seed");
    limit->add_option("--kernel", limit_kernel,
                      "multiply by this kernel's integral of K^2 (localized case)");
    limit->add_flag("--global", limit_global, "average per-u covariances over a 64-point grid");
    limit->add_option("--draws", limit_draws, "also sample this many Gaussian-limit draws");
    limit->add_option("--cov-out", limit_cov_out, "covariance CSV");
    limit->add_option("--sup-out", limit_sup_out, "sup-statistic sample CSV");

    // ---------------- experiment ----------------
    auto* exp_cmd = app.add_subcommand("experiment", "run a configured experiment");
    std::string exp_config, exp_out = "out";
    bool exp_help_keys = false;
    exp_cmd->add_option("--config", exp_config, "experiment config file");
    exp_cmd->add_option("--out", exp_out, "output directory");
    exp_cmd->add_flag("--help-config", exp_help_keys, "print the config key reference");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (sim->parsed()) {
        lse_spec* spec = sim_spec.make();
        if (!spec) return die(LSE_EINVAL);
        lse_paths* paths = nullptr;
        lse_status st;
        if (couple_k >= 0)
            st = lse_simulate_coupled(spec, sim_spec.n, couple_k, sim_reps, sim_seed,
                                      sim_burnin, &paths);
        else if (stationary_u >= 0.0)
            st = lse_simulate_stationary(spec, stationary_u, sim_spec.n, sim_reps, sim_seed,
                                         sim_burnin, &paths);
        else
            st = lse_simulate(spec, sim_spec.n, sim_reps, sim_seed, sim_burnin, &paths);
        if (st != LSE_OK) {
            lse_spec_free(spec);
            return die(st);
        }
        st = sim_bin ? lse_paths_save_bin(paths, sim_out.c_str())
                     : lse_paths_save_csv(paths, sim_out.c_str());
        lse_paths_free(paths);
        lse_spec_free(spec);
        if (st != LSE_OK) return die(st);
        return 0;
    }

    if (dep->parsed()) {
        lse_spec* spec = dep_spec.make();
        if (!spec) return die(LSE_EINVAL);
        lse_profile* profile = nullptr;
        lse_status st =
            lse_delta_profile(spec, dep_kmax, dep_nu, dep_reps, dep_seed, &profile);
        if (st != LSE_OK) {
            lse_spec_free(spec);
            return die(st);
        }
        std::cout << "k,delta,se\n";
        for (long i = 0; i < lse_profile_size(profile); ++i) {
            long lag;
            double d, se;
            lse_profile_row(profile, i, &lag, &d, &se);
            std::cout << lag << "," << fmt(d) << "," << fmt(se) << "\n";
        }
        if (!dep_fit.empty()) {
            double c, rate, residual;
            int independent;
            st = lse_fit_decay(profile, dep_fit.c_str(), &c, &rate, &residual, &independent);
            if (st != LSE_OK) {
                lse_profile_free(profile);
                lse_spec_free(spec);
                return die(st);
            }
            std::cout << "fit," << dep_fit << ",c=" << fmt(c) << ",rate=" << fmt(rate)
                      << ",residual=" << fmt(residual)
                      << ",independent=" << independent << "\n";
        }
        lse_profile_free(profile);
        lse_spec_free(spec);
        return 0;
    }

    if (rates->parsed()) {
        // explicit:file.csv loads one Delta value per line
        std::string desc = rates_decay;
        if (desc.rfind("explicit:", 0) == 0 && desc.find(".csv") != std::string::npos) {
            std::ifstream in(desc.substr(9));
            if (!in.good()) {
                std::cerr << "error: cannot open " << desc.substr(9) << "\n";
                return 2;
            }
            std::string vals, line;
            while (std::getline(in, line)) {
                if (line.empty() || line == "value") continue;
                if (!vals.empty()) vals += ",";
                vals += line;
            }
            desc = "explicit:" + vals;
        }
        lse_decay* decay = nullptr;
        if (lse_decay_create(desc.c_str(), &decay) != LSE_OK) return die(LSE_EINVAL);
        auto args = parse_points(rates_args);
        auto need = [&](std::size_t k) {
            if (args.size() < k) {
                std::cerr << "error: --op " << rates_op << " needs " << k << " argument(s)\n";
                std::exit(2);
            }
        };
        lse_status st = LSE_OK;
        std::cout << "op,decay,args,value\n";
        auto emit = [&](double v) {
            std::cout << rates_op << "," << rates_decay << "," << rates_args << "," << fmt(v)
                      << "\n";
        };
        if (rates_op == "beta") {
            need(1);
            double v;
            st = lse_beta(decay, static_cast<long>(args[0]), &v);
            if (st == LSE_OK) emit(v);
        } else if (rates_op == "qstar") {
            need(1);
            long v;
            st = lse_q_star(decay, args[0], &v);
            if (st == LSE_OK) emit(static_cast<double>(v));
        } else if (rates_op == "r") {
            need(1);
            double v;
            st = lse_r_of_delta(decay, args[0], &v);
            if (st == LSE_OK) emit(v);
        } else if (rates_op == "vnorm") {
            need(1);
            double v;
            st = lse_v_norm(decay, args[0], rates_dn, &v);
            if (st == LSE_OK) emit(v);
        } else if (rates_op == "psi") {
            need(1);
            double v;
            st = lse_psi(args[0], &v);
            if (st == LSE_OK) emit(v);
        } else if (rates_op == "h") {
            need(1);
            double v;
            st = lse_h_of(static_cast<long>(args[0]), &v);
            if (st == LSE_OK) emit(v);
        } else if (rates_op == "m") {
            need(3);  // n, delta, k
            double v;
            st = lse_m_threshold(decay, static_cast<long>(args[0]), args[1],
                                 static_cast<long>(args[2]), rates_dn, rates_dinf, &v);
            if (st == LSE_OK) emit(v);
        } else if (rates_op == "bracket") {
            need(4);  // eps, L_G, x_lo, x_hi
            long v;
            st = lse_entropy_indicator(args[0], args[1], args[2], args[3], &v);
            if (st == LSE_OK) emit(static_cast<double>(v));
        } else if (rates_op == "entropy") {
            need(1);  // sigma
            EntropyCtx ctx;
            if (rates_entropy == "log") {
                ctx.kind = 1;
            } else if (rates_entropy.rfind("const:", 0) == 0) {
                ctx.kind = 0;
                ctx.param = std::stod(rates_entropy.substr(6));
            } else if (rates_entropy.rfind("pow:", 0) == 0) {
                ctx.kind = 2;
                ctx.param = std::stod(rates_entropy.substr(4));
            } else if (rates_entropy.rfind("cor26:", 0) == 0) {
                ctx.kind = 3;
                ctx.param = std::stod(rates_entropy.substr(6));
            } else {
                std::cerr << "error: unknown entropy '" << rates_entropy << "'\n";
                return 2;
            }
            double v;
            int divergent;
            st = lse_entropy_integral(entropy_cb, &ctx, args[0], rates_with_psi ? 1 : 0, &v,
                                      &divergent);
            if (st == LSE_OK) {
                std::cout << rates_op << "," << rates_decay << "," << rates_args << ","
                          << (divergent ? "divergent" : fmt(v)) << "\n";
            }
        } else if (rates_op == "bound") {
            need(4);  // M, H, n, sigma  (+ optional c_delta, q)
            double cd = args.size() > 4 ? args[4] : 1.0;
            long q = args.size() > 5 ? static_cast<long>(args[5]) : 0;
            double v, v2;
            st = lse_variance_bound(decay, args[0], args[1], static_cast<long>(args[2]),
                                    args[3], cd, rates_dn, rates_dinf, q, &v, &v2);
            if (st == LSE_OK) {
                std::cout << "bound_min," << rates_decay << "," << rates_args << "," << fmt(v)
                          << "\n";
                std::cout << "bound_qstar," << rates_decay << "," << rates_args << ","
                          << fmt(v2) << "\n";
            }
        } else if (rates_op == "submult") {
            need(1);
            double cb;
            int pass;
            st = lse_submult_check(decay, static_cast<long>(args[0]), &cb, &pass);
            if (st == LSE_OK) {
                std::cout << rates_op << "," << rates_decay << "," << rates_args << ","
                          << fmt(cb) << (pass ? ",pass" : ",fail") << "\n";
            }
        } else if (rates_op == "cdelta") {
            need(5);  // s, l0, C_R, C_X, C_fbar (+ optional d)
            double d = args.size() > 5 ? args[5] : 1.0;
            double v;
            st = lse_c_delta(args[0], args[1], args[2], args[3], d, args[4], &v);
            if (st == LSE_OK) emit(v);
        } else {
            std::cerr << "error: unknown --op '" << rates_op << "'\n";
            lse_decay_free(decay);
            return 2;
        }
        lse_decay_free(decay);
        if (st != LSE_OK) return die(st);
        return 0;
    }

    if (edf_cmd->parsed()) {
        lse_paths* paths = nullptr;
        if (lse_paths_load(edf_in.c_str(), &paths) != LSE_OK) return die(LSE_EIO);
        if (edf_rep < 0 || edf_rep >= lse_paths_rows(paths)) {
            std::cerr << "error: replicate " << edf_rep << " out of range\n";
            lse_paths_free(paths);
            return 2;
        }
        std::vector<double> xs;
        if (edf_x.rfind("linspace:", 0) == 0) {
            auto args = parse_points(edf_x.substr(9));
            for (long i = 0; i < static_cast<long>(args[2]); ++i)
                xs.push_back(args[0] + (args[1] - args[0]) * i / (args[2] - 1));
        } else {
            xs = parse_points(edf_x);
        }
        long n = lse_paths_cols(paths);
        std::vector<double> values(xs.size());
        lse_status st;
        if (edf_v >= 0.0)
            st = lse_localized_edf(lse_paths_row(paths, edf_rep), n, xs.data(),
                                   static_cast<long>(xs.size()), edf_v, edf_h,
                                   edf_kernel.c_str(), values.data());
        else
            st = lse_edf(lse_paths_row(paths, edf_rep), n, xs.data(),
                         static_cast<long>(xs.size()), values.data());
        lse_paths_free(paths);
        if (st != LSE_OK) return die(st);
        std::cout << "x,value\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            std::cout << fmt(xs[i]) << "," << fmt(values[i]) << "\n";
        return 0;
    }

    if (kde_cmd->parsed()) {
        lse_paths* paths = nullptr;
        if (lse_paths_load(kde_in.c_str(), &paths) != LSE_OK) return die(LSE_EIO);
        if (kde_rep < 0 || kde_rep >= lse_paths_rows(paths)) {
            std::cerr << "error: replicate " << kde_rep << " out of range\n";
            lse_paths_free(paths);
            return 2;
        }
        auto expand = [](const std::string& text) {
            std::vector<double> g;
            if (text.rfind("linspace:", 0) == 0) {
                auto args = parse_points(text.substr(9));
                for (long i = 0; i < static_cast<long>(args[2]); ++i)
                    g.push_back(args[0] + (args[1] - args[0]) * i / (args[2] - 1));
            } else {
                g = parse_points(text);
            }
            return g;
        };
        auto xs = expand(kde_x);
        auto vs = expand(kde_v);
        long n = lse_paths_cols(paths);
        std::vector<double> values(xs.size() * vs.size());
        lse_status st = lse_kde(lse_paths_row(paths, kde_rep), n, xs.data(),
                                static_cast<long>(xs.size()), vs.data(),
                                static_cast<long>(vs.size()), kde_h1, kde_h2,
                                kde_kernel.c_str(), values.data());
        lse_paths_free(paths);
        if (st != LSE_OK) return die(st);
        std::cout << "x,v,value\n";
        for (std::size_t vi = 0; vi < vs.size(); ++vi)
            for (std::size_t xi = 0; xi < xs.size(); ++xi)
                std::cout << fmt(xs[xi]) << "," << fmt(vs[vi]) << ","
                          << fmt(values[vi * xs.size() + xi]) << "\n";
        return 0;
    }

    if (limit->parsed()) {
        lse_spec* spec = limit_spec.make();
        if (!spec) return die(LSE_EINVAL);
        auto xs = parse_points(limit_x);
        long nx = static_cast<long>(xs.size());
        std::vector<double> cov(nx * nx), se(nx * nx);
        lse_status st;
        if (limit_global)
            st = lse_longrun_cov_global(spec, xs.data(), nx, limit_pathlen, limit_lagmax,
                                        limit_seed, cov.data(), se.data());
        else
            st = lse_longrun_cov(spec, limit_v, xs.data(), nx, limit_pathlen, limit_lagmax,
                                 limit_seed, limit_kernel.empty() ? nullptr
                                                                  : limit_kernel.c_str(),
                                 cov.data(), se.data());
        lse_spec_free(spec);
        if (st != LSE_OK) return die(st);
        std::ofstream covf(limit_cov_out);
        covf << "x,y,cov,se\n";
        for (long i = 0; i < nx; ++i)
            for (long j = 0; j < nx; ++j)
                covf << fmt(xs[i]) << "," << fmt(xs[j]) << "," << fmt(cov[i * nx + j]) << ","
                     << fmt(se[i * nx + j]) << "\n";
        if (limit_draws > 0) {
            std::vector<double> sups(limit_draws);
            st = lse_gaussian_limit(cov.data(), nx, limit_draws, limit_seed + 1, nullptr,
                                    sups.data());
            if (st != LSE_OK) return die(st);
            std::ofstream supf(limit_sup_out);
            supf << "value\n";
            for (double s : sups) supf << fmt(s) << "\n";
        }
        return 0;
    }

    if (exp_cmd->parsed()) {
        if (exp_help_keys) {
            std::cout << lse_experiment_config_help();
            return 0;
        }
        if (exp_config.empty()) {
            std::cerr << "error: --config is required\n";
            return 2;
        }
        int total = 0, failed = 0;
        lse_status st =
            lse_experiment_run(exp_config.c_str(), exp_out.c_str(), &total, &failed);
        if (st != LSE_OK) return die(st);
        std::cout << "checks: " << total << ", failed: " << failed << " (report in "
                  << exp_out << ")\n";
        return failed == 0 ? 0 : 1;
    }

    return 2;
}
