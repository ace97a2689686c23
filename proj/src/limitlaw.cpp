// SPDX-License-Identifier: Apache-2.0
#include "limitlaw.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace lse {

namespace {

// Bartlett-weighted long-run covariance of the indicator vector along one
// path. Indicators are reduced to grid positions pos_i = #(grid points < X_i)
// so each lag costs O(N + nx^2).
void accumulate_longrun(const std::vector<int>& pos, std::size_t nx, long lagmax,
                        std::vector<double>& out) {
    const long N = static_cast<long>(pos.size());
    const double invN = 1.0 / static_cast<double>(N);
    const std::size_t cells = (nx + 1) * (nx + 1);
    std::vector<double> g(nx + 1, 0.0);  // Ghat over grid prefixes
    {
        std::vector<long> hist(nx + 1, 0);
        for (int p : pos) ++hist[p];
        long acc = 0;
        for (std::size_t s = 0; s <= nx; ++s) {
            acc += hist[s];
            g[s] = static_cast<double>(acc) * invN;
        }
    }

    // decremental histograms for the edge means
    std::vector<long> hist_lead(nx + 1, 0), hist_lag(nx + 1, 0);
    for (int p : pos) {
        ++hist_lead[p];
        ++hist_lag[p];
    }

    std::vector<long> pair_hist(cells);
    std::vector<double> cross((nx) * (nx));
    out.assign(nx * nx, 0.0);

    for (long k = 0; k <= lagmax; ++k) {
        if (k > 0) {
            --hist_lead[pos[N - k]];  // leading index range shrinks to i <= N-k
            --hist_lag[pos[k - 1]];   // lagged range starts at i = k+1
        }
        long m = N - k;
        if (m <= 0) break;
        std::fill(pair_hist.begin(), pair_hist.end(), 0);
        for (long i = 0; i < m; ++i)
            ++pair_hist[static_cast<std::size_t>(pos[i]) * (nx + 1) + pos[i + k]];
        // 2D prefix counts give C_k(s,t) = #{i : X_i <= x_s, X_{i+k} <= x_t}
        std::vector<long> col(nx + 1, 0);
        std::vector<double> lead_cdf(nx + 1, 0.0), lag_cdf(nx + 1, 0.0);
        {
            long a = 0, b = 0;
            for (std::size_t s = 0; s <= nx; ++s) {
                a += hist_lead[s];
                b += hist_lag[s];
                lead_cdf[s] = static_cast<double>(a);
                lag_cdf[s] = static_cast<double>(b);
            }
        }
        for (std::size_t s = 0; s <= nx; ++s) {
            long row_acc = 0;
            for (std::size_t t = 0; t <= nx; ++t) {
                row_acc += pair_hist[s * (nx + 1) + t];
                col[t] += row_acc;  // col[t] = C_k(s, t) after row s
                if (s < nx && t < nx) {
                    double gamma = static_cast<double>(col[t]) * invN -
                                   g[s] * lag_cdf[t] * invN - g[t] * lead_cdf[s] * invN +
                                   g[s] * g[t] * static_cast<double>(m) * invN;
                    cross[s * nx + t] = gamma;
                }
            }
        }
        double w = 1.0 - static_cast<double>(k) / static_cast<double>(lagmax + 1);
        for (std::size_t s = 0; s < nx; ++s)
            for (std::size_t t = s; t < nx; ++t) {
                double term = k == 0 ? cross[s * nx + t]
                                     : w * (cross[s * nx + t] + cross[t * nx + s]);
                out[s * nx + t] += term;
                if (t != s) out[t * nx + s] += term;
            }
    }
}

std::vector<int> grid_positions(const double* path, long n, std::span<const double> xgrid) {
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        // pos = index of the first grid point >= X_i; nx if none
        int lo = 0, hi = static_cast<int>(xgrid.size());
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (xgrid[mid] < path[i])
                lo = mid + 1;
            else
                hi = mid;
        }
        pos[static_cast<std::size_t>(i)] = lo;
    }
    return pos;
}

}  // namespace

CovarianceEstimate longrun_cov_indicator(const ProcessSpec& spec, double v,
                                         std::span<const double> xgrid, long pathlen,
                                         long lagmax, uint64_t seed,
                                         const KernelSpec* kernel) {
    require(!xgrid.empty(), Errc::InvalidArgument, "empty x grid");
    for (std::size_t t = 1; t < xgrid.size(); ++t)
        require(xgrid[t] > xgrid[t - 1], Errc::InvalidArgument,
                "x grid must be strictly increasing");
    if (lagmax < 0)
        lagmax = static_cast<long>(std::ceil(std::cbrt(static_cast<double>(pathlen))));
    require(lagmax >= 1, Errc::InvalidArgument, "lagmax must be >= 1");
    require(pathlen >= 50 * lagmax, Errc::InvalidArgument,
            "pathlen must be at least 50*lagmax (got pathlen = " + std::to_string(pathlen) +
                ", lagmax = " + std::to_string(lagmax) + ")");

    auto path = simulate_stationary(spec, v, pathlen, seed, -1, 1);
    auto pos = grid_positions(path.row(0), pathlen, xgrid);
    const std::size_t nx = xgrid.size();

    CovarianceEstimate cov;
    cov.xgrid.assign(xgrid.begin(), xgrid.end());
    cov.lagmax = lagmax;
    cov.pathlen = pathlen;
    accumulate_longrun(pos, nx, lagmax, cov.matrix);

    // block-wise estimates give a crude standard error per entry
    const int B = 16;
    long blk = pathlen / B;
    cov.se.assign(nx * nx, 0.0);
    if (blk >= 50) {
        long blk_lag = std::min<long>(lagmax, std::max<long>(1, blk / 50));
        std::vector<std::vector<double>> per_block(B);
        parallel_for(B, [&](std::size_t b) {
            std::vector<int> sub(pos.begin() + static_cast<long>(b) * blk,
                                 pos.begin() + static_cast<long>(b + 1) * blk);
            accumulate_longrun(sub, nx, blk_lag, per_block[b]);
        });
        for (std::size_t e = 0; e < nx * nx; ++e) {
            std::vector<double> vals(B);
            for (int b = 0; b < B; ++b) vals[b] = per_block[b][e];
            cov.se[e] = std::sqrt(variance(vals) / B);
        }
    }

    if (kernel != nullptr) {
        cov.kernel_factor = kernel_l2(*kernel);
        for (double& m : cov.matrix) m *= cov.kernel_factor;
        for (double& s : cov.se) s *= cov.kernel_factor;
    }
    return cov;
}

CovarianceEstimate longrun_cov_global(const ProcessSpec& spec, std::span<const double> xgrid,
                                      long pathlen, long lagmax, uint64_t seed) {
    const int kUGrid = 64;
    const std::size_t nx = xgrid.size();
    std::vector<CovarianceEstimate> per_u(kUGrid);
    parallel_for(kUGrid, [&](std::size_t g) {
        double u = (static_cast<double>(g) + 0.5) / kUGrid;
        per_u[g] = longrun_cov_indicator(spec, u, xgrid, pathlen, lagmax,
                                         seed + 0x9e3779b97f4a7c15ull * (g + 1), nullptr);
    });
    CovarianceEstimate out;
    out.xgrid.assign(xgrid.begin(), xgrid.end());
    out.lagmax = per_u[0].lagmax;
    out.pathlen = pathlen;
    out.matrix.assign(nx * nx, 0.0);
    out.se.assign(nx * nx, 0.0);
    for (int g = 0; g < kUGrid; ++g)
        for (std::size_t e = 0; e < nx * nx; ++e) {
            out.matrix[e] += per_u[g].matrix[e] / kUGrid;
            out.se[e] += per_u[g].se[e] * per_u[g].se[e];
        }
    for (std::size_t e = 0; e < nx * nx; ++e) out.se[e] = std::sqrt(out.se[e]) / kUGrid;
    return out;
}

GaussianLimitSample sample_gaussian_limit(const CovarianceEstimate& cov, long m,
                                          uint64_t seed) {
    require(m >= 1, Errc::InvalidArgument, "draw count must be >= 1");
    const std::size_t nx = cov.xgrid.size();
    require(cov.matrix.size() == nx * nx, Errc::InvalidArgument, "covariance size mismatch");
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(cov.at(i, j) == cov.at(j, i), Errc::InvalidArgument,
                    "covariance matrix is not symmetric");

    Eigen::MatrixXd sigma(nx, nx);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nx; ++j) sigma(i, j) = cov.at(i, j);

    double trace = sigma.trace();
    GaussianLimitSample out;
    out.m = m;
    out.dim = nx;

    Eigen::MatrixXd L;
    bool ok = false;
    double jitter = 0.0;
    if (trace <= 0.0) {
        // degenerate all-zero covariance: every draw is identically zero
        L = Eigen::MatrixXd::Zero(nx, nx);
        ok = true;
    } else {
        double base = trace / static_cast<double>(nx);
        for (double lam = 0.0; !ok; lam = (lam == 0.0 ? 1e-12 * base : lam * 10.0)) {
            if (lam > 1e-8 * base)
                fail(Errc::Failed,
                     "covariance is not positive semidefinite within the jitter cap " +
                         format_double(1e-8 * base));
            Eigen::MatrixXd work = sigma;
            for (std::size_t i = 0; i < nx; ++i) work(i, i) += lam;
            Eigen::LLT<Eigen::MatrixXd> llt(work);
            if (llt.info() == Eigen::Success) {
                L = llt.matrixL();
                jitter = lam;
                ok = true;
            }
        }
    }
    out.chol_jitter = jitter;

    out.draws.assign(static_cast<std::size_t>(m) * nx, 0.0);
    out.sup_stats.assign(static_cast<std::size_t>(m), 0.0);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t d) {
        Stream s(seed, d, StreamRole::Gaussian);
        Eigen::VectorXd z(nx);
        for (std::size_t j = 0; j < nx; ++j) z(j) = s.normal(j);
        Eigen::VectorXd g = L * z;
        double sup = 0.0;
        for (std::size_t j = 0; j < nx; ++j) {
            out.draws[d * nx + j] = g(j);
            sup = std::max(sup, std::fabs(g(j)));
        }
        out.sup_stats[d] = sup;
    });
    return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), Errc::InvalidArgument, "KS needs nonempty samples");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        double fa = static_cast<double>(i) / static_cast<double>(sa.size());
        double fb = static_cast<double>(j) / static_cast<double>(sb.size());
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

}  // namespace lse
