#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "estimators.hpp"
#include "kde_scan.hpp"
#include "process.hpp"
#include "util.hpp"

using namespace lse;

namespace {
double quad_l2(const KernelSpec& k) {
    // fine Simpson quadrature; exact rational nodes keep the endpoints on
    // the closed support
    const int m = 20000;
    double acc = 0;
    for (int i = 0; i < m; ++i) {
        double a = double(2 * i - m) / double(2 * m);
        double b = double(2 * (i + 1) - m) / double(2 * m);
        double mid = 0.5 * (a + b);
        acc += (b - a) / 6.0 * (k(a) * k(a) + 4.0 * k(mid) * k(mid) + k(b) * k(b));
    }
    return acc;
}
}  // namespace

TEST_CASE("kernel registry: unit mass, closed-form L2 norms") {
    for (auto name : {KernelSpec::Name::Rectangular, KernelSpec::Name::Triangular,
                      KernelSpec::Name::Epanechnikov}) {
        auto k = KernelSpec::get(name);
        // unit integral via quadrature
        const int m = 20000;
        double mass = 0;
        for (int i = 0; i < m; ++i) {
            double a = double(2 * i - m) / double(2 * m);
            double b = double(2 * (i + 1) - m) / double(2 * m);
            mass += (b - a) / 6.0 * (k(a) + 4.0 * k(0.5 * (a + b)) + k(b));
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(kernel_l2(k) == doctest::Approx(quad_l2(k)).epsilon(1e-9));
        CHECK(k(0.51) == 0.0);
        CHECK(k(-0.51) == 0.0);
    }
    CHECK(kernel_l2(KernelSpec::get(KernelSpec::Name::Rectangular)) == 1.0);
    CHECK(kernel_l2(KernelSpec::get(KernelSpec::Name::Epanechnikov)) ==
          doctest::Approx(1.2).epsilon(1e-15));
    CHECK(kernel_l2(KernelSpec::get(KernelSpec::Name::Triangular)) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(!KernelSpec::get(KernelSpec::Name::Rectangular).is_lipschitz());
}

TEST_CASE("edf basics and rank identity") {
    std::vector<double> sample = {1.0, 2.0, 3.0};
    std::vector<double> grid = {0.5, 2.0, 3.0, 4.0};
    auto e = edf(sample, grid);
    CHECK(e.values[0] == 0.0);
    CHECK(e.values[1] == doctest::Approx(2.0 / 3.0));
    CHECK(e.values[2] == 1.0);
    CHECK(e.values[3] == 1.0);
    CHECK_THROWS_AS(edf(std::span<const double>(), grid), Error);
}

TEST_CASE("edf matches the naive double loop exactly") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.4), Innovation::gaussian(), 1000);
    auto p = simulate_path(spec, 1000, 8, -1, 1);
    std::vector<double> grid;
    for (int i = -30; i <= 30; ++i) grid.push_back(i * 0.1 + 0.013);
    auto e = edf(std::span(p.row(0), 1000), grid);
    for (std::size_t t = 0; t < grid.size(); ++t) {
        long count = 0;
        for (long i = 0; i < 1000; ++i)
            if (p.row(0)[i] <= grid[t]) ++count;
        CHECK(e.values[t] == double(count) / 1000.0);
    }
}

TEST_CASE("localized edf with the full rectangular window is the plain edf") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 500);
    auto p = simulate_path(spec, 500, 3, -1, 1);
    std::vector<double> grid = {-1.0, 0.0, 0.5, 2.0};
    auto plain = edf(std::span(p.row(0), 500), grid);
    auto local = localized_edf(std::span(p.row(0), 500), grid, 0.5, 1.0,
                               KernelSpec::get(KernelSpec::Name::Rectangular));
    for (std::size_t t = 0; t < grid.size(); ++t)
        CHECK(local.values[t] == doctest::Approx(plain.values[t]).epsilon(1e-15));
}

TEST_CASE("localized edf weight mass concentrates at Riemann rate") {
    auto kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);
    for (long n : {100L, 1000L, 10000L}) {
        std::vector<double> path(n, 0.0);  // all values 0 => F(x>=0) = weight sum
        std::vector<double> grid = {1.0};
        auto e = localized_edf(path, grid, 0.5, 0.25, kernel);
        double c = kernel.lipschitz;
        CHECK(std::fabs(e.values[0] - 1.0) <= c / (double(n) * 0.25));
    }
}

TEST_CASE("localized edf is monotone in x and fails fast at the boundary") {
    auto spec = ProcessSpec::tvar1(CoeffFn::affine(0.1, 0.5), Innovation::gaussian(), 800);
    auto p = simulate_path(spec, 800, 21, -1, 1);
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(0.15 * i);
    auto kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);
    auto e = localized_edf(std::span(p.row(0), 800), grid, 0.4, 0.2, kernel);
    for (std::size_t t = 1; t < grid.size(); ++t) CHECK(e.values[t] >= e.values[t - 1]);
    CHECK_THROWS_AS(localized_edf(std::span(p.row(0), 800), grid, 0.05, 0.2, kernel), Error);
}

TEST_CASE("kde: nonnegativity, mass identity, additivity") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 2000);
    auto p = simulate_path(spec, 2000, 5, -1, 1);
    auto kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);
    double h1 = 0.3, h2 = 0.25;

    // wide fine x-grid for the mass check
    std::vector<double> xs;
    double step = h2 / 64.0;
    for (double x = -6.0; x <= 6.0; x += step) xs.push_back(x);
    std::vector<double> vs = {0.5};
    auto g = kde(std::span(p.row(0), 2000), xs, vs, h1, h2, kernel);

    double mass = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        mass += 0.5 * (g[i] + g[i + 1]) * step;
    // Fubini: integral over x equals the time-weight sum
    long n = 2000;
    double wsum = 0;
    for (long i = 1; i <= n; ++i)
        wsum += kernel((double(i) / n - 0.5) / h1) / (double(n) * h1);
    CHECK(mass == doctest::Approx(wsum).epsilon(1e-5));
    for (double v : g) CHECK(v >= 0.0);
}

TEST_CASE("kde approximates the standard normal density") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 100000);
    auto p = simulate_path(spec, 100000, 31, -1, 1);
    auto kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);
    std::vector<double> xs, vs = {0.5};
    for (double x = -2.0; x <= 2.0; x += 0.05) xs.push_back(x);
    auto g = kde(std::span(p.row(0), 100000), xs, vs, 0.5, 0.3, kernel);
    double worst = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double phi = std::exp(-0.5 * xs[i] * xs[i]) / 2.5066282746310005;
        worst = std::max(worst, std::fabs(g[i] - phi));
    }
    CHECK(worst < 0.02);
}

TEST_CASE("kde sup scan agrees with the naive estimator") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 400);
    auto p = simulate_path(spec, 400, 17, -1, 1);
    const long n = 400;
    double h1 = std::pow(double(n), -0.2), h2 = h1;
    double step = 1.0 / n;
    auto kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);

    double xmin = 1e300, xmax = -1e300;
    for (long i = 0; i < n; ++i) {
        xmin = std::min(xmin, p.row(0)[i]);
        xmax = std::max(xmax, p.row(0)[i]);
    }
    long c_lo = static_cast<long>(std::ceil((xmin - h2 / 2) / step));
    long c_hi = static_cast<long>(std::floor((xmax + h2 / 2) / step));
    std::size_t ncells = c_hi - c_lo + 1;

    // dense target: zero (plain sup of |ghat|)
    std::vector<double> zeros(static_cast<std::size_t>(n) * ncells, 0.0);
    KdeSupTarget target;
    target.dense = &zeros;
    double fast = kde_sup_scan(std::span(p.row(0), n), h1, h2, step, c_lo, c_hi, kernel, target);

    std::vector<double> xs(ncells), vs(n);
    for (std::size_t c = 0; c < ncells; ++c) xs[c] = double(c_lo + long(c)) * step;
    for (long j = 1; j <= n; ++j) vs[j - 1] = double(j) / n;
    auto g = kde(std::span(p.row(0), n), xs, vs, h1, h2, kernel);
    double slow = 0;
    for (double v : g) slow = std::max(slow, std::fabs(v));
    CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
}

TEST_CASE("kde sup scan with a separable target matches direct evaluation") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 300);
    auto p = simulate_path(spec, 300, 23, -1, 1);
    const long n = 300;
    double h1 = 0.2, h2 = 0.25, step = 1.0 / n;
    auto kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);
    long c_lo = -4 * n, c_hi = 4 * n;
    std::size_t ncells = c_hi - c_lo + 1;
    std::vector<double> colfactor(ncells);
    for (std::size_t c = 0; c < ncells; ++c) {
        double x = double(c_lo + long(c)) * step;
        colfactor[c] = std::exp(-x * x);  // arbitrary smooth column factor
    }
    KdeSupTarget target;
    target.colfactor = &colfactor;
    double fast = kde_sup_scan(std::span(p.row(0), n), h1, h2, step, c_lo, c_hi, kernel, target);

    // direct: evaluate ghat and the weight sum per (c, j)
    std::vector<double> xs(ncells), vs(n);
    for (std::size_t c = 0; c < ncells; ++c) xs[c] = double(c_lo + long(c)) * step;
    for (long j = 1; j <= n; ++j) vs[j - 1] = double(j) / n;
    auto g = kde(std::span(p.row(0), n), xs, vs, h1, h2, kernel);
    double slow = 0;
    for (long j = 1; j <= n; ++j) {
        double wsum = 0;
        for (long i = 1; i <= n; ++i)
            wsum += kernel((double(i) / n - double(j) / n) / h1) / (double(n) * h1);
        for (std::size_t c = 0; c < ncells; ++c)
            slow = std::max(slow,
                            std::fabs(g[(j - 1) * ncells + c] - wsum * colfactor[c]));
    }
    CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
}
