#pragma once

#include "gridauth/encoding.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace gridauth {

class EntropySource;

// 128-bit AES key that protects every stored credential.
class StoreKey {
public:
    static constexpr std::size_t kSize = 16;

    explicit StoreKey(const std::array<std::uint8_t, kSize>& material) : material_(material) {}
    // Exactly 32 hex characters. Throws ConfigError otherwise.
    static StoreKey from_hex(std::string_view hex);

    std::span<const std::uint8_t, kSize> material() const { return material_; }

private:
    std::array<std::uint8_t, kSize> material_;
};

// AES-128 credential encryption.
//
// Two constructions share one store key through derived subkeys:
//
//   randomized    AES-128-GCM, 96-bit random nonce.
//                 layout: nonce(12) || ciphertext || tag(16)
//   deterministic AES-SIV (RFC 5297) with two AES-128 subkeys.
//                 layout: siv(16) || ciphertext
//
// The deterministic form exists so usernames can be looked up by ciphertext
// equality; it leaks only whether two plaintexts are equal.
class CredentialCipher {
public:
    explicit CredentialCipher(const StoreKey& key);

    Bytes encrypt(std::span<const std::uint8_t> plaintext, EntropySource& entropy,
                  std::span<const std::uint8_t> associated_data = {}) const;
    // Throws AuthenticationError on tampering or wrong key.
    Bytes decrypt(std::span<const std::uint8_t> ciphertext, std::span<const std::uint8_t> associated_data = {}) const;

    Bytes encrypt_deterministic(std::span<const std::uint8_t> plaintext) const;
    Bytes decrypt_deterministic(std::span<const std::uint8_t> ciphertext) const;

private:
    std::array<std::uint8_t, 16> gcm_key_{};
    std::array<std::uint8_t, 32> siv_key_{};
};

} // namespace gridauth
