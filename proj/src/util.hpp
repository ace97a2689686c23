// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lse {

enum class Errc { InvalidArgument, Domain, Io, Failed };

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

/// Number of worker threads: LSE_THREADS if set, else hardware concurrency.
unsigned thread_count();

/// Static-partition parallel loop. Each index is processed exactly once and
/// results must be written to per-index slots, so output is independent of
/// the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Like parallel_for but hands each worker a contiguous [begin,end) range.
void parallel_ranges(std::size_t count,
                     const std::function<void(std::size_t, std::size_t)>& body);

uint64_t fnv1a64(std::string_view bytes);

/// Round-trip-safe decimal formatting ("%.17g"), locale-independent.
std::string format_double(double v);

std::vector<std::string> split(std::string_view s, char sep);
double parse_double(std::string_view s, const std::string& what);
long parse_long(std::string_view s, const std::string& what);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased (n-1)

}  // namespace lse
