#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "depmeasure.hpp"
#include "util.hpp"

using namespace lse;

namespace {
const double kSqrt2 = 1.4142135623730950488;
}

TEST_CASE("iid spec has exactly zero dependence at every positive lag") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 128);
    for (long k : {1L, 2L, 5L}) {
        auto est = estimate_delta(spec, k, 2.0, 200, 5);
        CHECK(est.value == 0.0);
    }
}

TEST_CASE("ar(0.5) dependence matches sqrt(2) a^k") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 256);
    auto profile = delta_profile(spec, 4, 2.0, 100000, 42);
    for (long k : {0L, 1L, 4L}) {
        double truth = kSqrt2 * std::pow(0.5, k);
        CHECK(profile.se[k] > 0.0);
        CHECK(std::fabs(profile.delta_hat[k] - truth) <= 3.0 * profile.se[k]);
    }
    // the one-lag estimator agrees with the profile row (same draws)
    auto est = estimate_delta(spec, 1, 2.0, 100000, 42);
    CHECK(est.value == profile.delta_hat[1]);
}

TEST_CASE("linear ma dependence is sqrt(2)|b_k|") {
    MaWeights w{MaWeights::Decay::Poly, 3.0};
    auto spec = ProcessSpec::tvlinear_ma(w, CoeffFn::constant_fn(1.0),
                                         Innovation::gaussian(), 128);
    auto profile = delta_profile(spec, 4, 2.0, 30000, 11);
    for (long k : {1L, 2L, 4L}) {
        double truth = kSqrt2 * std::pow(static_cast<double>(k + 1), -3.0);
        CHECK(std::fabs(profile.delta_hat[k] - truth) <= 3.0 * profile.se[k]);
    }
}

TEST_CASE("profile of ar(0.5) is log-linear with slope log(0.5)") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 256);
    auto profile = delta_profile(spec, 8, 2.0, 100000, 7);
    REQUIRE(profile.lags.size() == 9);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (long k = 1; k <= 8; ++k) {
        double y = std::log(profile.delta_hat[k]);
        sx += k;
        sy += y;
        sxx += double(k) * k;
        sxy += k * y;
        ++m;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == doctest::Approx(std::log(0.5)).epsilon(0.10));
}

TEST_CASE("fit_decay recovers exact inputs with zero residual") {
    DependenceProfile p;
    p.nu = 2.0;
    for (long k = 0; k <= 8; ++k) {
        p.lags.push_back(k);
        p.delta_hat.push_back(k == 0 ? 3.0 : 2.0 * std::pow(double(k), -3.0));
        p.se.push_back(1e-12);
    }
    auto poly = fit_decay(p, DecayModel::Kind::Polynomial);
    CHECK(poly.c == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(poly.rate == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(poly.fit_residual < 1e-10);

    DependenceProfile e;
    e.nu = 2.0;
    for (long k = 0; k <= 8; ++k) {
        e.lags.push_back(k);
        e.delta_hat.push_back(std::pow(0.9, double(k)));
        e.se.push_back(1e-12);
    }
    auto exp_fit = fit_decay(e, DecayModel::Kind::Exponential);
    CHECK(exp_fit.c == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(exp_fit.rate == doctest::Approx(0.9).epsilon(1e-10));
}

TEST_CASE("fit_decay on the ar(0.6) Monte Carlo profile recovers rho") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.6), Innovation::gaussian(), 256);
    auto profile = delta_profile(spec, 8, 2.0, 100000, 13);
    auto model = fit_decay(profile, DecayModel::Kind::Exponential);
    CHECK(model.rate > 0.55);
    CHECK(model.rate < 0.65);
    CHECK(model.c > 0.0);
}

TEST_CASE("all-zero profiles yield the degenerate independent model") {
    auto spec = ProcessSpec::iid(Innovation::gaussian(), 64);
    auto profile = delta_profile(spec, 5, 2.0, 200, 3);
    auto model = fit_decay(profile, DecayModel::Kind::Exponential);
    CHECK(model.independent);
    CHECK(model.eval(3) == 0.0);
}

TEST_CASE("scale equivariance is exact at lambda = 2 for linear families") {
    auto base = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(), 128);
    auto scaled =
        ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::gaussian(2.0), 128);
    for (long k : {0L, 2L}) {
        auto a = estimate_delta(base, k, 2.0, 2000, 99);
        auto b = estimate_delta(scaled, k, 2.0, 2000, 99);
        CHECK(b.value == 2.0 * a.value);  // power-of-two scaling commutes with rounding
    }
}

TEST_CASE("delta is nondecreasing in nu on matched draws") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::uniform(), 128);
    for (long k : {0L, 1L, 3L}) {
        auto d1 = estimate_delta(spec, k, 1.0, 3000, 21);
        auto d2 = estimate_delta(spec, k, 2.0, 3000, 21);
        auto d4 = estimate_delta(spec, k, 4.0, 3000, 21);
        CHECK(d1.value <= d2.value * (1 + 1e-12));
        CHECK(d2.value <= d4.value * (1 + 1e-12));
    }
}

TEST_CASE("moment guard rejects student-t below the requested order") {
    auto spec = ProcessSpec::tvar1(CoeffFn::constant_fn(0.5), Innovation::student_t(4), 64);
    CHECK_THROWS_AS(estimate_delta(spec, 1, 4.0, 200, 1), Error);
    CHECK_NOTHROW(estimate_delta(spec, 1, 2.0, 200, 1));
}

TEST_CASE("closed-form envelopes of contractive linear families decrease in lag") {
    auto profile = delta_profile(
        ProcessSpec::tvar1(CoeffFn::constant_fn(0.6), Innovation::gaussian(), 128), 6, 2.0,
        50000, 3);
    auto model = fit_decay(profile, DecayModel::Kind::Exponential);
    for (long k = 1; k < 10; ++k) CHECK(model.eval(k + 1) < model.eval(k));
}
