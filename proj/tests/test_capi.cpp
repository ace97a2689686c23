// Exercises the public shared-library surface end to end: handles, error
// codes, buffers, and the experiment entry point.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <lse/lse.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

TEST_CASE("version and error reporting") {
    CHECK(std::string(lse_version()).rfind("lse ", 0) == 0);
    lse_spec* spec = nullptr;
    CHECK(lse_spec_create("tvar1", "const:1.5", nullptr, nullptr, "gauss", 100, &spec) ==
          LSE_EINVAL);
    CHECK(std::strlen(lse_last_error()) > 0);
}

TEST_CASE("simulation round trip through handles and files") {
    lse_spec* spec = nullptr;
    REQUIRE(lse_spec_create("tvar1", "affine:0.2,0.6", nullptr, nullptr, "gauss", 64,
                            &spec) == LSE_OK);
    CHECK(lse_spec_default_burnin(spec) >= 1000);

    lse_paths* paths = nullptr;
    REQUIRE(lse_simulate(spec, 64, 3, 7, -1, &paths) == LSE_OK);
    CHECK(lse_paths_rows(paths) == 3);
    CHECK(lse_paths_cols(paths) == 64);
    REQUIRE(lse_paths_row(paths, 2) != nullptr);
    CHECK(lse_paths_row(paths, 3) == nullptr);

    auto dir = std::filesystem::temp_directory_path() / "lse_capi";
    std::filesystem::create_directories(dir);
    auto csv = (dir / "p.csv").string();
    auto bin = (dir / "p.bin").string();
    REQUIRE(lse_paths_save_csv(paths, csv.c_str()) == LSE_OK);
    REQUIRE(lse_paths_save_bin(paths, bin.c_str()) == LSE_OK);

    lse_paths* back = nullptr;
    REQUIRE(lse_paths_load(bin.c_str(), &back) == LSE_OK);
    CHECK(lse_paths_rows(back) == 3);
    for (long i = 0; i < 64; ++i)
        CHECK(lse_paths_row(back, 1)[i] == lse_paths_row(paths, 1)[i]);
    lse_paths_free(back);

    lse_paths* back_csv = nullptr;
    REQUIRE(lse_paths_load(csv.c_str(), &back_csv) == LSE_OK);
    CHECK(lse_paths_cols(back_csv) == 64);
    lse_paths_free(back_csv);

    // binary header: magic + dims
    std::ifstream f(bin, std::ios::binary);
    char magic[4];
    f.read(magic, 4);
    CHECK(std::memcmp(magic, "LSE1", 4) == 0);
    uint32_t rows = 0, cols = 0;
    f.read(reinterpret_cast<char*>(&rows), 4);
    f.read(reinterpret_cast<char*>(&cols), 4);
    CHECK(rows == 3);
    CHECK(cols == 64);

    lse_paths_free(paths);
    lse_spec_free(spec);
    std::filesystem::remove_all(dir);
}

TEST_CASE("coupled simulation and dependence estimation through the api") {
    lse_spec* spec = nullptr;
    REQUIRE(lse_spec_create("tvar1", "const:0.5", nullptr, nullptr, "gauss", 128, &spec) ==
            LSE_OK);
    lse_paths* pair = nullptr;
    REQUIRE(lse_simulate_coupled(spec, 128, 2, 4, 5, -1, &pair) == LSE_OK);
    CHECK(lse_paths_rows(pair) == 8);
    lse_paths_free(pair);

    double delta = 0, se = 0;
    REQUIRE(lse_delta_estimate(spec, 1, 2.0, 5000, 5, &delta, &se) == LSE_OK);
    CHECK(std::fabs(delta - 0.70710678) <= 5 * se);

    lse_profile* profile = nullptr;
    REQUIRE(lse_delta_profile(spec, 4, 2.0, 2000, 5, &profile) == LSE_OK);
    CHECK(lse_profile_size(profile) == 5);
    long lag;
    double d, s2;
    REQUIRE(lse_profile_row(profile, 0, &lag, &d, &s2) == LSE_OK);
    CHECK(lag == 0);
    double c, rate, residual;
    int independent;
    REQUIRE(lse_fit_decay(profile, "exp", &c, &rate, &residual, &independent) == LSE_OK);
    CHECK(independent == 0);
    CHECK(rate > 0.3);
    CHECK(rate < 0.7);
    lse_profile_free(profile);
    lse_spec_free(spec);
}

TEST_CASE("rate calculus through the api") {
    lse_decay* d = nullptr;
    REQUIRE(lse_decay_create("exp:1,0.5", &d) == LSE_OK);
    double v;
    REQUIRE(lse_beta(d, 3, &v) == LSE_OK);
    CHECK(v == doctest::Approx(0.25));
    long q;
    REQUIRE(lse_q_star(d, 1.0, &q) == LSE_OK);
    CHECK(q == 1);
    REQUIRE(lse_r_of_delta(d, 1e-4, &v) == LSE_OK);
    CHECK(v <= 1e-4);
    REQUIRE(lse_v_norm(d, 0.4, 1.0, &v) == LSE_OK);
    CHECK(v > 0.4);
    REQUIRE(lse_psi(1.0, &v) == LSE_OK);
    CHECK(v == 0.0);
    REQUIRE(lse_h_of(21, &v) == LSE_OK);
    CHECK(v == doctest::Approx(std::log(21.0)));
    REQUIRE(lse_m_threshold(d, 100, 0.3, 1, 1.0, 1.0, &v) == LSE_OK);
    long brackets;
    REQUIRE(lse_entropy_indicator(0.5, 1.0, 0.0, 1.0, &brackets) == LSE_OK);
    CHECK(brackets == 7);
    REQUIRE(lse_c_delta(1.0, 1.0, 0.5, 1.0, 1.0, 1.0, &v) == LSE_OK);
    CHECK(v == doctest::Approx(2.0));

    double value, qstar_form;
    REQUIRE(lse_variance_bound(d, 1.0, 1.0, 10000, 0.1, 1.0, 1.0, 1.0, 0, &value,
                               &qstar_form) == LSE_OK);
    CHECK(value > 0);
    double cb;
    int pass;
    REQUIRE(lse_submult_check(d, 64, &cb, &pass) == LSE_OK);
    CHECK(pass == 1);
    lse_decay_free(d);

    // Delta(k) = delta(k-1) for the single-weight class with s = 1
    double L[1] = {1.0};
    REQUIRE(lse_delta_bound_model("exp", 1.0, 0.5, 1.0, L, 1, 0.5, 1.0, 1.0, 3, &v) ==
            LSE_OK);
    CHECK(v == doctest::Approx(0.25));

    CHECK(lse_decay_create("bogus:1", &d) == LSE_EINVAL);
}

namespace {
double entropy_sqrt_log(double eps, void*) { return std::log(1.0 / eps); }
double entropy_pow2(double eps, void*) { return std::pow(eps, -2.0); }
}  // namespace

TEST_CASE("entropy integral callback") {
    double value;
    int divergent;
    REQUIRE(lse_entropy_integral(entropy_sqrt_log, nullptr, 1.0, 0, &value, &divergent) ==
            LSE_OK);
    CHECK(divergent == 0);
    CHECK(value == doctest::Approx(0.8862269254527580).epsilon(1e-4));
    REQUIRE(lse_entropy_integral(entropy_pow2, nullptr, 1.0, 0, &value, &divergent) == LSE_OK);
    CHECK(divergent == 1);
}

TEST_CASE("estimators and limit law through the api") {
    lse_spec* spec = nullptr;
    REQUIRE(lse_spec_create("iid", nullptr, nullptr, nullptr, "gauss", 1000, &spec) == LSE_OK);
    lse_paths* paths = nullptr;
    REQUIRE(lse_simulate(spec, 1000, 1, 3, -1, &paths) == LSE_OK);

    double xs[3] = {-1.0, 0.0, 1.0};
    double values[3];
    REQUIRE(lse_edf(lse_paths_row(paths, 0), 1000, xs, 3, values) == LSE_OK);
    CHECK(values[1] == doctest::Approx(0.5).epsilon(0.15));
    REQUIRE(lse_localized_edf(lse_paths_row(paths, 0), 1000, xs, 3, 0.5, 0.2, "epan",
                              values) == LSE_OK);
    double vgrid[2] = {0.4, 0.6};
    std::vector<double> dens(2 * 3);
    REQUIRE(lse_kde(lse_paths_row(paths, 0), 1000, xs, 3, vgrid, 2, 0.2, 0.3, "epan",
                    dens.data()) == LSE_OK);
    double l2;
    REQUIRE(lse_kernel_l2("tri", &l2) == LSE_OK);
    CHECK(l2 == doctest::Approx(4.0 / 3.0));

    double cov[9], se[9];
    REQUIRE(lse_longrun_cov(spec, 0.5, xs, 3, 50000, 30, 9, nullptr, cov, se) == LSE_OK);
    CHECK(std::fabs(cov[4] - 0.25) < 0.02);
    std::vector<double> sups(500);
    REQUIRE(lse_gaussian_limit(cov, 3, 500, 4, nullptr, sups.data()) == LSE_OK);
    double ks;
    REQUIRE(lse_ks_distance(sups.data(), 500, sups.data(), 500, &ks) == LSE_OK);
    CHECK(ks == 0.0);

    lse_paths_free(paths);
    lse_spec_free(spec);
}

TEST_CASE("experiment entry point writes reports and honors determinism") {
    auto dir = std::filesystem::temp_directory_path() / "lse_capi_exp";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto cfgfile = (dir / "t.cfg").string();
    std::ofstream(cfgfile) << "[experiment]\ntype = table_sandwich\n"
                           << "[process]\nfamily = none\n"
                           << "[schedule]\ndecay = poly:1,2\n";
    int total = 0, failed = 0;
    REQUIRE(lse_experiment_run(cfgfile.c_str(), (dir / "out1").string().c_str(), &total,
                               &failed) == LSE_OK);
    CHECK(total > 0);
    CHECK(failed == 0);
    REQUIRE(lse_experiment_run(cfgfile.c_str(), (dir / "out2").string().c_str(), &total,
                               &failed) == LSE_OK);
    std::ifstream a(dir / "out1" / "report.csv"), b(dir / "out2" / "report.csv");
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());

    CHECK(lse_experiment_run("/nonexistent/path.cfg", (dir / "out3").string().c_str(), &total,
                             &failed) == LSE_EIO);
    CHECK(std::string(lse_experiment_config_help()).find("[experiment]") !=
          std::string::npos);
    std::filesystem::remove_all(dir);
}
