// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "limitlaw.hpp"
#include "process.hpp"

namespace lse {

/// Parsed experiment configuration (flat INI sections with key = value
/// lines). Validation happens before any simulation.
struct ExperimentConfig {
    enum class Type { FcltEdf, FcltLocalEdf, KdeRate, VarianceBound, TableSandwich };

    Type type = Type::FcltEdf;
    uint64_t seed = 1;
    long reps = 500;

    // [process]
    ProcessSpec spec = ProcessSpec::iid(Innovation::gaussian(), 1);
    bool has_process = false;

    // [grids]
    std::vector<double> xgrid;
    double v = 0.5;

    // [schedule]
    std::vector<long> schedule_n;
    // bandwidth rule coef * n^exp, or an explicit per-n list
    struct BwRule {
        bool is_rule = true;
        double coef = 1.0, exp = 0.0;
        std::vector<double> list;
        double at(std::size_t i, long n) const;
    };
    BwRule h, h1, h2;
    long pathlen = 1000000;
    long lagmax = -1;
    long pilot_reps = 200;
    long gauss_draws = 100000;
    long class_size = 8;
    long class_size_big = 64;
    double rate_alpha_s = std::numeric_limits<double>::infinity();
    KernelSpec kernel = KernelSpec::get(KernelSpec::Name::Epanechnikov);
    std::string decay = "poly:1,2";  // table sandwich

    // [tolerances] (defaults are the pinned check thresholds)
    std::map<std::string, double> tol;
    double tolerance(const std::string& key, double fallback) const;

    std::string raw_text;  // for the config digest

    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);
    static const char* config_help();
};

struct CheckRow {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = true;
    double se = 0.0;
    bool informational = false;  // recorded but never fails the run
};

struct ExperimentReport {
    std::vector<CheckRow> checks;
    std::vector<std::pair<std::string, std::string>> provenance;
    std::map<std::string, std::vector<double>> samples;  // raw per-check samples
    double elapsed_seconds = 0.0;  // console only, never written to files

    bool all_passed() const;
    const CheckRow* find(const std::string& name) const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes report.csv, summary.txt and one samples_<name>.csv per raw sample
/// vector. Output is a pure function of (config, seed): no timestamps.
void write_report(const ExperimentReport& rep, const std::string& out_dir);

}  // namespace lse
