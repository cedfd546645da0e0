#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fraisse {

// FNV-1a, 64-bit. Used for cache keys and enumeration fingerprints, which
// must be stable across runs, platforms and standard libraries (std::hash
// gives no such guarantee).
class Fnv64 {
public:
    static constexpr std::uint64_t kOffset = 14695981039346656037ull;
    static constexpr std::uint64_t kPrime = 1099511628211ull;

    Fnv64& bytes(std::string_view s) {
        for (unsigned char c : s) {
            state_ ^= c;
            state_ *= kPrime;
        }
        return *this;
    }

    Fnv64& u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xff;
            state_ *= kPrime;
        }
        return *this;
    }

    Fnv64& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }

    Fnv64& ints(const std::vector<int>& xs) {
        u64(xs.size());
        for (int x : xs) i64(x);
        return *this;
    }

    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_ = kOffset;
};

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

} // namespace fraisse
