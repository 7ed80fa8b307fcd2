#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace gridauth {

// Source of random bytes for keys, layouts and session tokens.
//
// Production code uses SystemEntropy (OS CSPRNG via OpenSSL). Tests and the
// simulation harness use SeededEntropy so that runs are reproducible.
class EntropySource {
public:
    virtual ~EntropySource() = default;

    // Fills `out` completely or throws EntropyError.
    virtual void fill(std::span<std::byte> out) = 0;

    std::uint32_t next_u32();

    // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    // bound must be nonzero.
    std::uint32_t uniform(std::uint32_t bound);
};

class SystemEntropy final : public EntropySource {
public:
    void fill(std::span<std::byte> out) override;
};

// Deterministic stream for replayable tests and simulations.
// NOT suitable for production secrets.
class SeededEntropy final : public EntropySource {
public:
    explicit SeededEntropy(std::uint64_t seed) : engine_(seed) {}

    void fill(std::span<std::byte> out) override;

private:
    std::mt19937_64 engine_;
};

// Derives an independent per-trial seed from a base seed and a trial index
// (splitmix64 finalizer), so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

} // namespace gridauth
