// SPDX-License-Identifier: Apache-2.0
#include "rng.hpp"

#include <cmath>

namespace lse {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hilo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    lo = static_cast<uint32_t>(p);
    hi = static_cast<uint32_t>(p >> 32);
}

inline std::array<uint32_t, 4> round_once(const std::array<uint32_t, 4>& c,
                                          const std::array<uint32_t, 2>& k) {
    uint32_t lo0, hi0, lo1, hi1;
    mul_hilo(kPhiloxM0, c[0], lo0, hi0);
    mul_hilo(kPhiloxM1, c[2], lo1, hi1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

}  // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 2>& key,
                                   std::array<uint32_t, 4> ctr) {
    std::array<uint32_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kPhiloxW0;
            k[1] += kPhiloxW1;
        }
        ctr = round_once(ctr, k);
    }
    return ctr;
}

const char* stream_role_name(StreamRole role) {
    switch (role) {
        case StreamRole::Innovation: return "innovation";
        case StreamRole::Couple: return "couple";
        case StreamRole::Bootstrap: return "bootstrap";
        case StreamRole::Gaussian: return "gaussian";
        case StreamRole::Pilot: return "pilot";
        case StreamRole::Aux: return "aux";
    }
    return "?";
}

uint64_t Stream::bits(uint64_t idx) const {
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                   static_cast<uint32_t>(seed_ >> 32)};
    std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(idx),
                                   static_cast<uint32_t>(idx >> 32),
                                   static_cast<uint32_t>(id_),
                                   static_cast<uint32_t>(id_ >> 32)};
    auto out = philox4x32(key, ctr);
    return (static_cast<uint64_t>(out[1]) << 32) | out[0];
}

double Stream::uniform(uint64_t idx) const {
    return static_cast<double>(bits(idx) >> 11) * kInv53;
}

double Stream::normal(uint64_t idx) const {
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                   static_cast<uint32_t>(seed_ >> 32)};
    std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(idx),
                                   static_cast<uint32_t>(idx >> 32),
                                   static_cast<uint32_t>(id_),
                                   static_cast<uint32_t>(id_ >> 32)};
    auto out = philox4x32(key, ctr);
    uint64_t a = (static_cast<uint64_t>(out[1]) << 32) | out[0];
    uint64_t b = (static_cast<uint64_t>(out[3]) << 32) | out[2];
    // u1 in (0,1] keeps the log finite; u2 in [0,1).
    double u1 = static_cast<double>((a >> 11) + 1) * kInv53;
    double u2 = static_cast<double>(b >> 11) * kInv53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::string Stream::label() const {
    return "seed=" + std::to_string(seed_) + "/rep=" + std::to_string(id_ >> 4) +
           "/role=" + stream_role_name(static_cast<StreamRole>(id_ & 0xF));
}

}  // namespace lse
