// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace lse {

/// Philox4x32-10 keyed block function (Salmon et al., SC 2011).
/// Pure function of (key, counter): random access, no state.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 2>& key,
                                   std::array<uint32_t, 4> ctr);

/// Role tag baked into the stream id so that logically distinct draws
/// (path innovations, the swapped copy, bootstrap resampling, ...) can
/// never collide even under the same (seed, replicate).
enum class StreamRole : uint32_t {
    Innovation = 0,
    Couple = 1,
    Bootstrap = 2,
    Gaussian = 3,
    Pilot = 4,
    Aux = 5,
};

const char* stream_role_name(StreamRole role);

/// A counter-based random stream addressed by (seed, replicate, role).
/// Every draw is a pure function of the stream id and a 64-bit index, so
/// outputs are reproducible under any execution order.
class Stream {
public:
    Stream(uint64_t seed, uint64_t replicate, StreamRole role)
        : seed_(seed), id_((replicate << 4) | static_cast<uint64_t>(role)) {}

    uint64_t bits(uint64_t idx) const;
    double uniform(uint64_t idx) const;  // [0, 1)
    double normal(uint64_t idx) const;   // one N(0,1) per index (Box-Muller)

    uint64_t id() const { return id_; }
    uint64_t seed() const { return seed_; }
    std::string label() const;

private:
    uint64_t seed_;
    uint64_t id_;
};

}  // namespace lse
