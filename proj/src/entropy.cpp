#include "gridauth/entropy.hpp"

#include "gridauth/error.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <climits>
#include <cstring>

namespace gridauth {

std::uint32_t EntropySource::next_u32() {
    std::byte buf[4];
    fill(buf);
    std::uint32_t v = 0;
    for (std::byte b : buf) {
        v = (v << 8) | static_cast<std::uint32_t>(b);
    }
    return v;
}

std::uint32_t EntropySource::uniform(std::uint32_t bound) {
    if (bound == 0) {
        throw ValidationError("uniform: bound must be nonzero");
    }
    // Largest multiple of bound that fits in 2^32; values above it are redrawn.
    const std::uint64_t range = std::uint64_t{1} << 32;
    const std::uint64_t limit = range - (range % bound);
    for (;;) {
        const std::uint64_t v = next_u32();
        if (v < limit) {
            return static_cast<std::uint32_t>(v % bound);
        }
    }
}

void SystemEntropy::fill(std::span<std::byte> out) {
    if (out.empty()) {
        return;
    }
    if (out.size() > static_cast<std::size_t>(INT_MAX) ||
        RAND_bytes(reinterpret_cast<unsigned char*>(out.data()), static_cast<int>(out.size())) != 1) {
        throw EntropyError("system entropy source failed");
    }
}

void SeededEntropy::fill(std::span<std::byte> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = engine_();
        const std::size_t n = std::min<std::size_t>(8, out.size() - i);
        for (std::size_t j = 0; j < n; ++j) {
            out[i + j] = static_cast<std::byte>(word & 0xff);
            word >>= 8;
        }
        i += n;
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace gridauth
