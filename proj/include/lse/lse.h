/* SPDX-License-Identifier: Apache-2.0
 *
 * lse -- locally stationary empirics: simulation of Bernoulli-shift
 * processes with coupled copies, dependence-measure estimation, the
 * dependence/rate calculus, empirical distribution and density estimators,
 * long-run covariance estimation, and a config-driven experiment harness.
 *
 * All functions return LSE_OK on success; on failure a thread-local message
 * is available from lse_last_error(). Objects are opaque handles released
 * with their _free function. Every operation is deterministic in its seed
 * arguments regardless of thread count (set LSE_THREADS to override the
 * default worker count).
 */
#ifndef LSE_H
#define LSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lse_status {
    LSE_OK = 0,
    LSE_EINVAL = 1,  /* invalid argument / malformed input */
    LSE_EDOMAIN = 2, /* valid input outside the supported domain */
    LSE_EIO = 3,     /* file I/O failure */
    LSE_EFAILED = 4  /* computation failed (e.g. non-PSD covariance) */
} lse_status;

const char* lse_version(void);
/* Message for the most recent failure on this thread ("" if none). */
const char* lse_last_error(void);

/* ------------------------------------------------------------------ */
/* process specifications and path simulation                          */

typedef struct lse_spec lse_spec;
typedef struct lse_paths lse_paths;

/* family: "iid" | "tvar1" | "tvma" | "tvarch1"
 * coef/coef2: "const:c" | "affine:a,b" | "sine:a,b,f" (coef2 = ARCH a1)
 * ma: "poly:gamma" | "exp:rho" (TvLinearMA weight decay; ignored otherwise)
 * innovation: "gauss" | "t:df" | "uniform", optional "@scale" suffix
 * n: declared sample size (evaluation horizon of the coupling operations) */
lse_status lse_spec_create(const char* family, const char* coef, const char* coef2,
                           const char* ma, const char* innovation, long n, lse_spec** out);
void lse_spec_free(lse_spec* spec);
long lse_spec_default_burnin(const lse_spec* spec);

/* X_1..X_n with coefficients at u = i/n. burnin < 0 selects the default. */
lse_status lse_simulate(const lse_spec* spec, long n, long reps, uint64_t seed, long burnin,
                        lse_paths** out);
/* Frozen-coefficient stationary approximation at rescaled time u. */
lse_status lse_simulate_stationary(const lse_spec* spec, double u, long n, long reps,
                                   uint64_t seed, long burnin, lse_paths** out);
/* Coupled pair: innovation at index n-k replaced by an independent copy.
 * The result holds 2*reps rows: rows [0,reps) base, rows [reps,2reps) coupled. */
lse_status lse_simulate_coupled(const lse_spec* spec, long n, long k, long reps,
                                uint64_t seed, long burnin, lse_paths** out);

long lse_paths_rows(const lse_paths* paths);
long lse_paths_cols(const lse_paths* paths);
const double* lse_paths_row(const lse_paths* paths, long row);
lse_status lse_paths_save_csv(const lse_paths* paths, const char* file);
lse_status lse_paths_save_bin(const lse_paths* paths, const char* file);
lse_status lse_paths_load(const char* file, lse_paths** out);
void lse_paths_free(lse_paths* paths);

/* Monte Carlo fit of the local-stationarity deviation max_i ||X_i -
 * Xtilde_i(i/n)||_{2s} over the ladder {n/8, n/4, n/2, n}. Arrays must hold
 * 4 entries; varsigma/c_x receive the fitted decay exponent and constant. */
lse_status lse_local_stationarity(const lse_spec* spec, long n, double s, long reps,
                                  uint64_t seed, double* deviations, double* varsigma,
                                  double* c_x);

/* ------------------------------------------------------------------ */
/* dependence measure                                                  */

typedef struct lse_profile lse_profile;

/* Coupled-path estimate of delta_nu(k) with a bootstrap standard error. */
lse_status lse_delta_estimate(const lse_spec* spec, long k, double nu, long reps,
                              uint64_t seed, double* delta, double* se);
lse_status lse_delta_profile(const lse_spec* spec, long kmax, double nu, long reps,
                             uint64_t seed, lse_profile** out);
long lse_profile_size(const lse_profile* profile);
lse_status lse_profile_row(const lse_profile* profile, long i, long* lag, double* delta,
                           double* se);
/* kind: "poly" (c*k^-alpha) | "exp" (c*rho^k). independent = 1 flags an
 * all-zero profile (degenerate model, c/rate meaningless). */
lse_status lse_fit_decay(const lse_profile* profile, const char* kind, double* c,
                         double* rate, double* residual, int* independent);
void lse_profile_free(lse_profile* profile);

/* ------------------------------------------------------------------ */
/* rate calculus                                                       */

typedef struct lse_decay lse_decay;

/* "poly:c,alpha" | "exp:c,rho" | "explicit:v1,v2,..." */
lse_status lse_decay_create(const char* desc, lse_decay** out);
void lse_decay_free(lse_decay* decay);

lse_status lse_beta(const lse_decay* decay, long q, double* out);
lse_status lse_q_star(const lse_decay* decay, double x, long* out);
lse_status lse_r_of_delta(const lse_decay* decay, double delta, double* out);
lse_status lse_v_norm(const lse_decay* decay, double f2n, double d_n, double* out);
lse_status lse_psi(double eps, double* out);
lse_status lse_h_of(long k, double* out);
lse_status lse_m_threshold(const lse_decay* decay, long n, double delta_val, long k,
                           double d_n, double d_inf, double* out);
lse_status lse_entropy_indicator(double eps, double l_g, double x_lo, double x_hi,
                                 long* out);
/* 2*max(d,1)*|L|_1*C_X^s*C_R + C_fbar with the single weight l0. */
lse_status lse_c_delta(double s, double l0, double c_r, double c_x, double d,
                       double c_fbar, double* out);

/* Tightest admissible Delta(k) = 2 d C_R sum_{j<k} L_j delta(k-j-1)^s, with
 * delta taken from an estimated profile (all lags below k must be present)
 * or from a fitted decay model ("poly"/"exp" with constants c and rate). */
lse_status lse_delta_bound(const lse_profile* profile, double s, const double* L, long nl,
                           double c_r, double c_x, double d, long k, double* out);
lse_status lse_delta_bound_model(const char* kind, double c, double rate, double s,
                                 const double* L, long nl, double c_r, double c_x, double d,
                                 long k, double* out);

/* Entropy integral over (0, sigma] for a caller-supplied eps -> H(eps);
 * divergent output is 1 when the singularity is not integrable (value then
 * holds the partial integral). */
typedef double (*lse_entropy_fn)(double eps, void* ctx);
lse_status lse_entropy_integral(lse_entropy_fn entropy, void* ctx, double sigma,
                                int with_psi, double* value, int* divergent);

/* Three-term variance bound (universal constant 1) minimized over block
 * lengths q in {1..n} (or evaluated at q when q > 0); also returns the
 * q*-substituted variant. */
lse_status lse_variance_bound(const lse_decay* decay, double m_bound, double h, long n,
                              double sigma, double c_delta_v, double d_n, double d_inf,
                              long q, double* value, double* qstar_form);

/* Fitted submultiplicativity constant of beta over q1*q2 <= qmax; pass = 0
 * when the constant drifts with the cap or beta vanishes prematurely. */
lse_status lse_submult_check(const lse_decay* decay, long qmax, double* c_beta, int* pass);

/* ------------------------------------------------------------------ */
/* estimators                                                          */

/* kernel: "rect" | "tri" | "epan" (support [-1/2,1/2], unit integral) */
lse_status lse_kernel_l2(const char* kernel, double* out);

lse_status lse_edf(const double* data, long n, const double* xs, long nx, double* out);
lse_status lse_localized_edf(const double* data, long n, const double* xs, long nx,
                             double v, double h, const char* kernel, double* out);
/* out is nv x nx row-major. */
lse_status lse_kde(const double* data, long n, const double* xs, long nx, const double* vs,
                   long nv, double h1, double h2, const char* kernel, double* out);

/* ------------------------------------------------------------------ */
/* limit law                                                           */

/* Bartlett long-run covariance of the indicator vector along a simulated
 * stationary path at v. cov and se are nx x nx row-major (se may be NULL);
 * kernel != NULL multiplies every entry by its integral of K^2. lagmax < 0
 * selects ceil(pathlen^{1/3}). */
lse_status lse_longrun_cov(const lse_spec* spec, double v, const double* xs, long nx,
                           long pathlen, long lagmax, uint64_t seed, const char* kernel,
                           double* cov, double* se);
/* Per-u long-run covariances averaged over a 64-point u-grid. */
lse_status lse_longrun_cov_global(const lse_spec* spec, const double* xs, long nx,
                                  long pathlen, long lagmax, uint64_t seed, double* cov,
                                  double* se);
/* M draws from the centered Gaussian limit; draws is m x nx row-major (may
 * be NULL), sups receives the per-draw sup |G(x)| (may be NULL). */
lse_status lse_gaussian_limit(const double* cov, long nx, long m, uint64_t seed,
                              double* draws, double* sups);
lse_status lse_ks_distance(const double* a, long na, const double* b, long nb, double* out);

/* ------------------------------------------------------------------ */
/* experiment harness                                                  */

/* Runs the experiment described by the config file and writes report.csv,
 * summary.txt and raw sample CSVs into out_dir. checks_failed counts gating
 * rows that failed (informational rows never count). */
lse_status lse_experiment_run(const char* config_path, const char* out_dir,
                              int* checks_total, int* checks_failed);
/* Key-by-key description of the config format. */
const char* lse_experiment_config_help(void);

#ifdef __cplusplus
}
#endif

#endif /* LSE_H */
