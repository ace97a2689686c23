// SPDX-License-Identifier: Apache-2.0
#include "util.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace lse {

unsigned thread_count() {
    if (const char* env = std::getenv("LSE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_ranges(std::size_t count,
                     const std::function<void(std::size_t, std::size_t)>& body) {
    if (count == 0) return;
    unsigned workers = thread_count();
    if (workers <= 1 || count == 1) {
        body(0, count);
        return;
    }
    if (workers > count) workers = static_cast<unsigned>(count);
    std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> failed{false};
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, w, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
                failed.store(true);
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) {
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    parallel_ranges(count, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) body(i);
    });
}

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, const std::string& what) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    require(end == tmp.c_str() + tmp.size() && !tmp.empty(), Errc::InvalidArgument,
            "cannot parse number for " + what + ": '" + tmp + "'");
    return v;
}

long parse_long(std::string_view s, const std::string& what) {
    double v = parse_double(s, what);
    long r = static_cast<long>(v);
    require(static_cast<double>(r) == v, Errc::InvalidArgument,
            what + " must be an integer, got '" + std::string(s) + "'");
    return r;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace lse
