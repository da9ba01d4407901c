#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sgl {

// SplitMix64 finalizer. Full-avalanche mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over the tag bytes, used to separate purpose-tagged streams.
inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Counter-based stream: every draw is mix64(key ^ mix64(counter)), so the
// sequence is a pure function of (master seed, tag, index) and the draw
// counter. Streams with distinct keys are independent for Monte Carlo
// purposes; no state is shared between streams.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::string_view tag, std::uint64_t index)
        : key_(make_key(master_seed, tag, index)) {}

    static std::uint64_t make_key(std::uint64_t master_seed, std::string_view tag,
                                  std::uint64_t index) {
        std::uint64_t k = mix64(master_seed ^ 0x8f1bbcdcbfa53e0bULL);
        k = mix64(k ^ hash_tag(tag));
        return mix64(k + mix64(index));
    }

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(++counter_)); }

    // Uniform on the open interval (0,1); never returns an endpoint, so it is
    // safe to take logarithms.
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform on [a,b).
    double uniform(double a, double b) { return a + (b - a) * u01(); }

    // Standard normal via Box-Muller. std::normal_distribution is
    // implementation-defined, which would break byte-identical reports.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = u01();
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sgl
