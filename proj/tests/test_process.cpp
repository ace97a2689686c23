#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "limitlaw.hpp"
#include "process.hpp"
#include "util.hpp"

using namespace lse;

namespace {
// the stream counter layout: time i >= 1 on even counters, presamples odd
uint64_t eps_idx(long i) {
    return i >= 1 ? 2 * static_cast<uint64_t>(i - 1) : 2 * static_cast<uint64_t>(-i) + 1;
}

double sample_var(const double* x, long n) {
    double m = 0;
    for (long i = 0; i < n; ++i) m += x[i];
    m /= n;
    double v = 0;
    for (long i = 0; i < n; ++i) v += (x[i] - m) * (x[i] - m);
    return v / (n - 1);
}
}  // namespace

TEST_CASE("iid gaussian draws are standard and uncorrelated") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 3);
    auto p3 = simulate_path(spec, 3, 9, -1, 1);
    CHECK(p3.n == 3);

    const long n = 100000;
    auto p = simulate_path(spec, n, 9, -1, 1);
    const double* x = p.row(0);
    double r1 = 0, m = 0;
    for (long i = 0; i < n; ++i) m += x[i];
    m /= n;
    for (long i = 0; i + 1 < n; ++i) r1 += (x[i] - m) * (x[i + 1] - m);
    r1 /= (n - 1) * sample_var(x, n);
    CHECK(std::fabs(r1) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("ar1 with zero coefficient reproduces the iid path bit for bit") {
    auto iid = ProcessSpec::iid(Innovation::gaussian(), 64);
    auto ar0 = ProcessSpec::tvar1(CoeffFn::constant_fn(0.0), Innovation::gaussian(), 64);
    auto a = simulate_path(iid, 64, 123, 100, 2);
    auto b = simulate_path(ar0, 64, 123, 100, 2);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("ar1 stationary variance matches the closed form") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 100);
    const long n = 100000;
    auto p = simulate_path(spec, n, 2024, -1, 1);
    double v = sample_var(p.row(0), n);
    CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(0.02));
}

TEST_CASE("non-contractive or invalid specs are rejected") {
    CHECK_THROWS_AS(ProcessSpec::tvar1(CoeffFn::constant_fn(1.01), Innovation::gaussian(), 10),
                    Error);
    CHECK_THROWS_AS(ProcessSpec::tvar1(CoeffFn::affine(0.5, 0.6), Innovation::gaussian(), 10),
                    Error);  // sup |a| = 1.1
    CHECK_THROWS_AS(
        ProcessSpec::tvlinear_ma({MaWeights::Decay::Poly, 0.9}, CoeffFn::constant_fn(1.0),
                                 Innovation::gaussian(), 10),
        Error);
    CHECK_THROWS_AS(ProcessSpec::tvarch1(CoeffFn::constant_fn(0.0), CoeffFn::constant_fn(0.5),
                                         Innovation::gaussian(), 10),
                    Error);
    CHECK_THROWS_AS(ProcessSpec::iid(Innovation::gaussian(), 0), Error);
    CHECK_THROWS_AS(Innovation::student_t(2.0), Error);
}

TEST_CASE("frozen coefficient matches the constant-coefficient path") {
    auto tv = ProcessSpec::tvar1(CoeffFn::affine(0.2, 0.6), Innovation::gaussian(), 200);
    auto frozen = simulate_stationary(tv, 0.0, 200, 7, 500, 3);
    auto constant =
        simulate_path(ProcessSpec::tvar1(CoeffFn::constant_fn(0.2), Innovation::gaussian(), 200),
                      200, 7, 500, 3);
    for (std::size_t i = 0; i < frozen.values.size(); ++i)
        CHECK(frozen.values[i] == constant.values[i]);
}

TEST_CASE("frozen-coefficient variances at u=0 and u=1") {
    auto tv = ProcessSpec::tvar1(CoeffFn::affine(0.2, 0.6), Innovation::gaussian(), 100);
    const long n = 100000;
    auto p0 = simulate_stationary(tv, 0.0, n, 11, -1, 1);
    auto p1 = simulate_stationary(tv, 1.0, n, 12, -1, 1);
    CHECK(sample_var(p0.row(0), n) == doctest::Approx(1.0 / (1.0 - 0.04)).epsilon(0.02));
    CHECK(sample_var(p1.row(0), n) == doctest::Approx(1.0 / (1.0 - 0.64)).epsilon(0.02));
}

TEST_CASE("iid stationary approximation equals the path for every u") {
    auto spec = ProcessSpec::iid(Innovation::uniform(), 50);
    auto path = simulate_path(spec, 50, 5, 10, 2);
    for (double u : {0.0, 0.3, 1.0}) {
        auto st = simulate_stationary(spec, u, 50, 5, 10, 2);
        for (std::size_t i = 0; i < path.values.size(); ++i)
            CHECK(st.values[i] == path.values[i]);
    }
}

TEST_CASE("coupled pairs: iid") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 32);
    for (long k : {1L, 3L}) {
        auto pair = simulate_coupled_pair(spec, 32, k, 77, 10, 4);
        for (long r = 0; r < 4; ++r)
            CHECK(pair.row(r)[31] == pair.coupled_row(r)[31]);  // only eps_n matters
    }
    // k = 0 swaps the innovation at the evaluation index itself
    auto pair0 = simulate_coupled_pair(spec, 32, 0, 77, 10, 1);
    Stream main(77, 0, StreamRole::Innovation);
    Stream couple(77, 0, StreamRole::Couple);
    Innovation innov = Innovation::gaussian();
    double expected = innov.draw(main, eps_idx(32)) - innov.draw(couple, eps_idx(32));
    CHECK(pair0.row(0)[31] - pair0.coupled_row(0)[31] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("coupled pairs: ar1 difference is the unrolled recursion") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 40);
    const long n = 40, k = 3, burnin = 50;
    auto pair = simulate_coupled_pair(spec, n, k, 3, burnin, 2);
    for (long r = 0; r < 2; ++r) {
        // oracle: recompute both recursions independently
        Stream main(3, r, StreamRole::Innovation);
        Stream couple(3, r, StreamRole::Couple);
        Innovation innov = Innovation::gaussian();
        double xa = 0, xb = 0;
        for (long i = 1 - burnin; i <= n; ++i) {
            uint64_t idx = eps_idx(i);
            double ea = innov.draw(main, idx);
            double eb = (i == n - k) ? innov.draw(couple, idx) : ea;
            xa = 0.5 * xa + ea;
            xb = 0.5 * xb + eb;
        }
        CHECK(pair.row(r)[n - 1] == xa);
        CHECK(pair.coupled_row(r)[n - 1] == xb);
        double eps_diff = innov.draw(main, eps_idx(n - k)) - innov.draw(couple, eps_idx(n - k));
        CHECK(xa - xb == doctest::Approx(0.125 * eps_diff).epsilon(1e-12));
    }
}

TEST_CASE("coupling beyond the truncated past is exact and bounded by the pre") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 16);
    long burnin = 20;
    auto pair = simulate_coupled_pair(spec, 16, 16 + burnin, 5, burnin, 1);
    for (long i = 0; i < 16; ++i) CHECK(pair.row(0)[i] == pair.coupled_row(0)[i]);
    CHECK_THROWS_AS(simulate_coupled_pair(spec, 16, 16 + burnin + 1, 5, burnin, 1), Error);
}

TEST_CASE("doubling the burnin moves the endpoint by less than the tail bound") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.7), Innovation::gaussian(), 64);
    auto a = simulate_path(spec, 64, 99, 20, 1);
    auto b = simulate_path(spec, 64, 99, 40, 1);
    // state entering the short window is bounded by the largest |X| seen
    double xmax = 0;
    for (long i = 0; i < 64; ++i) xmax = std::max(xmax, std::fabs(b.row(0)[i]));
    double bound = spec.truncation_tail_bound(20) * 10.0 * std::max(xmax, 1.0);
    CHECK(std::fabs(a.row(0)[63] - b.row(0)[63]) <= bound);
}

TEST_CASE("stationary approximation is shift-invariant across time windows") {
    auto spec = ProcessSpec::tvar1(CoeffFn::affine(0.2, 0.6), Innovation::gaussian(), 100);
    const long m = 4096;
    auto path = simulate_stationary(spec, 0.5, 3 * m, 31, -1, 1);
    std::vector<double> w1(path.row(0), path.row(0) + m);
    std::vector<double> w2(path.row(0) + 2 * m, path.row(0) + 3 * m);
    // KS critical value at ~1% level, doubled for serial dependence
    double crit = 2.0 * 1.63 * std::sqrt(2.0 / m);
    CHECK(ks_distance(w1, w2) < crit);
}

TEST_CASE("determinism across thread counts and runs") {
    auto spec = ProcessSpec::tvarch1(CoeffFn::constant_fn(0.3), CoeffFn::affine(0.1, 0.2),
                                     Innovation::gaussian(), 64);
    setenv("LSE_THREADS", "1", 1);
    auto a = simulate_path(spec, 64, 1234, -1, 8);
    setenv("LSE_THREADS", "3", 1);
    auto b = simulate_path(spec, 64, 1234, -1, 8);
    unsetenv("LSE_THREADS");
    auto c = simulate_path(spec, 64, 1234, -1, 8);
    CHECK(a.values == b.values);
    CHECK(a.values == c.values);
}

TEST_CASE("tvma matches its moving-average definition") {
    MaWeights w{MaWeights::Decay::Poly, 3.0};
    auto spec = ProcessSpec::tvlinear_ma(w, CoeffFn::constant_fn(1.0), Innovation::gaussian(), 64);
    long burnin = spec.default_burnin();
    auto p = simulate_path(spec, 64, 17, burnin, 1);
    Stream main(17, 0, StreamRole::Innovation);
    Innovation innov = Innovation::gaussian();
    long jmax = std::min(w.cutoff(1e-8), burnin);
    double acc = 0;
    for (long j = 0; j <= jmax; ++j) acc += w.weight(j) * innov.draw(main, eps_idx(64 - j));
    CHECK(p.row(0)[63] == doctest::Approx(acc).epsilon(1e-14));
}

TEST_CASE("local stationarity: exact zeros for iid and constant coefficients") {
    auto iid = ProcessSpec::iid(Innovation::gaussian(), 256);
    auto rep = local_stationarity_check(iid, 256, 1.0, 50, 4);
    for (double d : rep.deviation) CHECK(d == 0.0);

    auto ar = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 256);
    auto rep2 = local_stationarity_check(ar, 256, 1.0, 50, 4);
    for (double d : rep2.deviation) CHECK(d == 0.0);
}

TEST_CASE("local stationarity: Lipschitz coefficient gives exponent near 1") {
    auto spec = ProcessSpec::tvar1(CoeffFn::affine(0.2, 0.6), Innovation::gaussian(), 2000);
    auto rep = local_stationarity_check(spec, 2000, 1.0, 10000, 21);
    CHECK(rep.varsigma_hat > 0.8);
    CHECK(rep.varsigma_hat < 1.2);
    CHECK(rep.c_x_hat > 0.0);
}
