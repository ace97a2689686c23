#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "limitlaw.hpp"
#include "util.hpp"

using namespace lse;

namespace {
double norm_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }
}  // namespace

TEST_CASE("iid indicator long-run covariance matches the closed form") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 100);
    std::vector<double> grid = {0.0, 1.0};
    auto cov = longrun_cov_indicator(spec, 0.5, grid, 100000, 20, 91);
    // diagonal: G(x)(1-G(x)); off-diagonal: G(min) - G(x)G(y)
    CHECK(std::fabs(cov.at(0, 0) - 0.25) <= 3.0 * cov.se_at(0, 0));
    double target01 = norm_cdf(0.0) * (1.0 - norm_cdf(1.0));
    CHECK(target01 == doctest::Approx(0.0793276269657).epsilon(1e-9));
    CHECK(std::fabs(cov.at(0, 1) - target01) <= 3.0 * cov.se_at(0, 1));
    CHECK(cov.at(0, 1) == cov.at(1, 0));
}

TEST_CASE("ar(0.5) covariance is stable in the window and matches batch means") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 100);
    std::vector<double> grid = {0.0};
    auto c50 = longrun_cov_indicator(spec, 0.5, grid, 200000, 50, 7);
    auto c100 = longrun_cov_indicator(spec, 0.5, grid, 200000, 100, 7);
    auto c200 = longrun_cov_indicator(spec, 0.5, grid, 200000, 200, 7);
    double se = std::max({c50.se_at(0, 0), c100.se_at(0, 0), c200.se_at(0, 0)});
    CHECK(std::fabs(c100.at(0, 0) - c50.at(0, 0)) <= 2.0 * se);
    CHECK(std::fabs(c200.at(0, 0) - c100.at(0, 0)) <= 2.0 * se);

    // batch-means oracle on an independent path
    const long blen = 500, nb = 400;
    auto path = simulate_stationary(spec, 0.5, blen * nb, 1234, -1, 1);
    std::vector<double> bm(nb);
    double gmean = 0;
    for (long i = 0; i < blen * nb; ++i) gmean += path.row(0)[i] <= 0.0 ? 1.0 : 0.0;
    gmean /= double(blen) * nb;
    for (long b = 0; b < nb; ++b) {
        double m = 0;
        for (long i = 0; i < blen; ++i) m += path.row(0)[b * blen + i] <= 0.0 ? 1.0 : 0.0;
        bm[b] = m / blen;
    }
    double batch_var = 0;
    for (double v : bm) batch_var += (v - gmean) * (v - gmean);
    double oracle = blen * batch_var / (nb - 1);
    double oracle_se = oracle * std::sqrt(2.0 / (nb - 1));
    CHECK(std::fabs(c100.at(0, 0) - oracle) <=
          3.0 * std::sqrt(oracle_se * oracle_se + c100.se_at(0, 0) * c100.se_at(0, 0)));
}

TEST_CASE("bartlett estimate is symmetric and nearly psd") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.6), Innovation::gaussian(), 100);
    std::vector<double> grid = {-1.0, -0.3, 0.2, 0.9};
    auto cov = longrun_cov_indicator(spec, 0.5, grid, 100000, -1, 3);
    Eigen::MatrixXd m(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            m(i, j) = cov.at(i, j);
            CHECK(cov.at(i, j) == cov.at(j, i));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * m.trace());
    for (int i = 0; i < 4; ++i) CHECK(cov.at(i, i) >= 0.0);
}

TEST_CASE("kernel factor multiplies every entry exactly") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 100);
    std::vector<double> grid = {-0.5, 0.5};
    auto plain = longrun_cov_indicator(spec, 0.5, grid, 50000, 30, 5);
    auto kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);
    auto scaled = longrun_cov_indicator(spec, 0.5, grid, 50000, 30, 5, &kernel);
    CHECK(scaled.kernel_factor == doctest::Approx(1.2).epsilon(1e-15));
    for (std::size_t e = 0; e < plain.matrix.size(); ++e)
        CHECK(scaled.matrix[e] == plain.matrix[e] * scaled.kernel_factor);
}

TEST_CASE("iid closed form is monotone in the first argument below y") {
    auto g = [](double x) { return norm_cdf(x); };
    std::vector<double> xs = {-2.0, -1.0, -0.2, 0.4, 1.1};
    double y = 1.5;
    double prev = -1;
    for (double x : xs) {
        double value = g(std::min(x, y)) - g(x) * g(y);
        CHECK(value >= prev);
        prev = value;
    }
}

TEST_CASE("global covariance of an iid spec equals the local one") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 100);
    std::vector<double> grid = {0.0};
    auto global = longrun_cov_global(spec, grid, 20000, 20, 17);
    CHECK(std::fabs(global.at(0, 0) - 0.25) < 0.01);
}

TEST_CASE("gaussian limit sampling: identity, rank-1 and psd failure") {
    CovarianceEstimate id;
    id.xgrid = {0.0, 1.0, 2.0};
    id.matrix = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    id.se.assign(9, 0.0);
    auto s = sample_gaussian_limit(id, 100000, 5);
    CHECK(s.chol_jitter == 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0;
            for (long d = 0; d < s.m; ++d) acc += s.draws[d * 3 + i] * s.draws[d * 3 + j];
            acc /= s.m;
            CHECK(std::fabs(acc - (i == j ? 1.0 : 0.0)) < 0.05);
        }

    CovarianceEstimate ones;
    ones.xgrid = {0.0, 1.0, 2.0};
    ones.matrix.assign(9, 1.0);
    ones.se.assign(9, 0.0);
    auto r1 = sample_gaussian_limit(ones, 100, 6);
    for (long d = 0; d < 100; ++d) {
        CHECK(r1.draws[d * 3 + 1] == doctest::Approx(r1.draws[d * 3]).epsilon(1e-3));
        CHECK(r1.draws[d * 3 + 2] == doctest::Approx(r1.draws[d * 3]).epsilon(1e-3));
    }

    CovarianceEstimate bad;
    bad.xgrid = {0.0, 1.0};
    bad.matrix = {1.0, 2.0, 2.0, 1.0};  // eigenvalues 3, -1
    bad.se.assign(4, 0.0);
    CHECK_THROWS_AS(sample_gaussian_limit(bad, 10, 7), Error);
}

TEST_CASE("gaussian limit sup statistics match a direct empirical-process oracle") {
    // iid EDF case on 5 grid points
    std::vector<double> grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const std::size_t nx = grid.size();
    CovarianceEstimate cov;
    cov.xgrid = grid;
    cov.matrix.resize(nx * nx);
    cov.se.assign(nx * nx, 0.0);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nx; ++j) {
            double x = grid[std::min(i, j)];
            cov.matrix[i * nx + j] = norm_cdf(x) - norm_cdf(grid[i]) * norm_cdf(grid[j]);
        }
    auto s = sample_gaussian_limit(cov, 4000, 11);
    double mean_sup = mean(s.sup_stats);
    double se_sup = std::sqrt(variance(s.sup_stats) / s.m);

    // oracle: simulate sqrt(n)(Ghat - G) directly at n = 10^5
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 100);
    const long n = 100000, reps = 400;
    auto paths = simulate_path(spec, n, 2024, -1, reps);
    std::vector<double> oracle_sups(reps);
    parallel_for(reps, [&](std::size_t r) {
        double sup = 0;
        const double* row = paths.row(static_cast<long>(r));
        for (std::size_t t = 0; t < nx; ++t) {
            long count = 0;
            for (long i = 0; i < n; ++i)
                if (row[i] <= grid[t]) ++count;
            double stat = std::sqrt(double(n)) * (double(count) / n - norm_cdf(grid[t]));
            sup = std::max(sup, std::fabs(stat));
        }
        oracle_sups[r] = sup;
    });
    double oracle_mean = mean(oracle_sups);
    double oracle_se = std::sqrt(variance(oracle_sups) / reps);
    double comb = std::sqrt(se_sup * se_sup + oracle_se * oracle_se);
    CHECK(std::fabs(mean_sup - oracle_mean) <= 3.0 * comb);
}

TEST_CASE("two-sample ks distance") {
    std::vector<double> a = {1.0, 2.0, 3.0};
    CHECK(ks_distance(a, a) == 0.0);
    std::vector<double> zero = {0.0}, one = {1.0};
    CHECK(ks_distance(zero, one) == 1.0);

    auto spec = ProcessSpec::iid(Innovation::gaussian(), 100);
    auto pa = simulate_path(spec, 10000, 100, -1, 1);
    auto pb = simulate_path(spec, 10000, 200, -1, 1);
    std::vector<double> sa(pa.row(0), pa.row(0) + 10000);
    std::vector<double> sb(pb.row(0), pb.row(0) + 10000);
    CHECK(ks_distance(sa, sb) < 0.0231);  // 1.63*sqrt(2/n), the 99.5% point
}
