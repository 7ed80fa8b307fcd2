#include "gridauth/credential_crypto.hpp"

#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <memory>

namespace gridauth {

namespace {

constexpr std::size_t kNonceSize = 12;
constexpr std::size_t kTagSize = 16;

struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CtxPtr new_ctx() {
    CtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) {
        throw Error("EVP_CIPHER_CTX_new failed");
    }
    return ctx;
}

const EVP_CIPHER* siv_cipher() {
    struct Deleter {
        void operator()(EVP_CIPHER* c) const { EVP_CIPHER_free(c); }
    };
    static const std::unique_ptr<EVP_CIPHER, Deleter> cipher(EVP_CIPHER_fetch(nullptr, "AES-128-SIV", nullptr));
    if (!cipher) {
        throw Error("AES-128-SIV is not available in this OpenSSL build");
    }
    return cipher.get();
}

int as_int(std::size_t n) {
    if (n > 1u << 20) {
        throw ValidationError("credential too large");
    }
    return static_cast<int>(n);
}

// AES-128 single-block encryption of a label: a PRF used for subkey derivation.
std::array<std::uint8_t, 16> derive_block(std::span<const std::uint8_t, 16> key, std::uint8_t label) {
    std::array<std::uint8_t, 16> in{};
    const char tag[] = "gridauth-kdf";
    std::memcpy(in.data(), tag, sizeof tag - 1);
    in[15] = label;

    std::array<std::uint8_t, 16> out{};
    auto ctx = new_ctx();
    int len = 0;
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1 ||
        EVP_CIPHER_CTX_set_padding(ctx.get(), 0) != 1 ||
        EVP_EncryptUpdate(ctx.get(), out.data(), &len, in.data(), static_cast<int>(in.size())) != 1 ||
        len != 16) {
        throw Error("subkey derivation failed");
    }
    return out;
}

} // namespace

StoreKey StoreKey::from_hex(std::string_view hex) {
    const auto bytes = hex_decode(hex);
    if (!bytes || bytes->size() != kSize) {
        throw ConfigError("store key must be exactly 32 hex characters (128 bits)");
    }
    std::array<std::uint8_t, kSize> m{};
    std::memcpy(m.data(), bytes->data(), kSize);
    return StoreKey(m);
}

CredentialCipher::CredentialCipher(const StoreKey& key) {
    gcm_key_ = derive_block(key.material(), 1);
    const auto a = derive_block(key.material(), 2);
    const auto b = derive_block(key.material(), 3);
    std::memcpy(siv_key_.data(), a.data(), 16);
    std::memcpy(siv_key_.data() + 16, b.data(), 16);
}

Bytes CredentialCipher::encrypt(std::span<const std::uint8_t> plaintext, EntropySource& entropy,
                                std::span<const std::uint8_t> associated_data) const {
    Bytes out(kNonceSize + plaintext.size() + kTagSize);
    entropy.fill(std::as_writable_bytes(std::span(out.data(), kNonceSize)));

    auto ctx = new_ctx();
    int len = 0;
    int fin = 0;
    bool ok = EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, gcm_key_.data(), out.data()) == 1;
    if (ok && !associated_data.empty()) {
        ok = EVP_EncryptUpdate(ctx.get(), nullptr, &len, associated_data.data(), as_int(associated_data.size())) == 1;
    }
    ok = ok &&
         EVP_EncryptUpdate(ctx.get(), out.data() + kNonceSize, &len, plaintext.data(), as_int(plaintext.size())) ==
             1 &&
         EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceSize + len, &fin) == 1 &&
         EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, static_cast<int>(kTagSize),
                             out.data() + kNonceSize + plaintext.size()) == 1;
    if (!ok) {
        throw Error("AES-GCM encryption failed");
    }
    return out;
}

Bytes CredentialCipher::decrypt(std::span<const std::uint8_t> ciphertext,
                                std::span<const std::uint8_t> associated_data) const {
    if (ciphertext.size() < kNonceSize + kTagSize) {
        throw AuthenticationError("ciphertext too short");
    }
    const std::size_t body = ciphertext.size() - kNonceSize - kTagSize;
    Bytes out(body);
    std::array<std::uint8_t, kTagSize> tag{};
    std::memcpy(tag.data(), ciphertext.data() + kNonceSize + body, kTagSize);

    auto ctx = new_ctx();
    int len = 0;
    int fin = 0;
    bool ok =
        EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, gcm_key_.data(), ciphertext.data()) == 1;
    if (ok && !associated_data.empty()) {
        ok = EVP_DecryptUpdate(ctx.get(), nullptr, &len, associated_data.data(), as_int(associated_data.size())) == 1;
    }
    ok = ok &&
         EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data() + kNonceSize, as_int(body)) == 1 &&
         EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, static_cast<int>(kTagSize), tag.data()) == 1 &&
         EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) == 1;
    if (!ok) {
        throw AuthenticationError("credential authentication failed");
    }
    return out;
}

Bytes CredentialCipher::encrypt_deterministic(std::span<const std::uint8_t> plaintext) const {
    Bytes out(kTagSize + plaintext.size());
    auto ctx = new_ctx();
    int len = 0;
    int fin = 0;
    const bool ok =
        EVP_EncryptInit_ex2(ctx.get(), siv_cipher(), siv_key_.data(), nullptr, nullptr) == 1 &&
        EVP_EncryptUpdate(ctx.get(), out.data() + kTagSize, &len, plaintext.data(), as_int(plaintext.size())) == 1 &&
        EVP_EncryptFinal_ex(ctx.get(), out.data() + kTagSize + len, &fin) == 1 &&
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, static_cast<int>(kTagSize), out.data()) == 1;
    if (!ok) {
        throw Error("AES-SIV encryption failed");
    }
    return out;
}

Bytes CredentialCipher::decrypt_deterministic(std::span<const std::uint8_t> ciphertext) const {
    if (ciphertext.size() < kTagSize) {
        throw AuthenticationError("ciphertext too short");
    }
    const std::size_t body = ciphertext.size() - kTagSize;
    Bytes out(body);
    std::array<std::uint8_t, kTagSize> tag{};
    std::memcpy(tag.data(), ciphertext.data(), kTagSize);

    auto ctx = new_ctx();
    int len = 0;
    int fin = 0;
    const bool ok =
        EVP_DecryptInit_ex2(ctx.get(), siv_cipher(), siv_key_.data(), nullptr, nullptr) == 1 &&
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, static_cast<int>(kTagSize), tag.data()) == 1 &&
        EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data() + kTagSize, as_int(body)) == 1 &&
        EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) == 1;
    if (!ok) {
        throw AuthenticationError("credential authentication failed");
    }
    return out;
}

} // namespace gridauth
