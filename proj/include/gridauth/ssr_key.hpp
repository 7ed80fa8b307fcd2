#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gridauth {

class EntropySource;

// A 4-digit decimal authentication secret, "0000".."9999".
class KeyNumber {
public:
    using Digits = std::array<std::uint8_t, 4>;

    // Throws ValidationError if any digit is above 9.
    static KeyNumber from_digits(const Digits& digits);
    // 0..9999, most significant digit first.
    static KeyNumber from_value(int value);
    // Exactly four ASCII digits.
    static KeyNumber parse(std::string_view text);

    const Digits& digits() const { return digits_; }
    std::uint8_t digit(std::size_t position) const { return digits_.at(position); }
    int value() const;
    std::string to_string() const;

    friend bool operator==(const KeyNumber&, const KeyNumber&) = default;

private:
    explicit KeyNumber(const Digits& d) : digits_(d) {}
    Digits digits_{};
};

class DayOfMonth {
public:
    // Throws ValidationError outside 1..31.
    explicit DayOfMonth(int day);

    int value() const { return day_; }

    friend bool operator==(DayOfMonth, DayOfMonth) = default;

private:
    int day_;
};

// One digit expanded to all four key positions, e.g. 7 -> 7777.
class RepeatedDigitKey {
public:
    explicit RepeatedDigitKey(std::uint8_t digit);

    std::uint8_t digit() const { return digit_; }
    KeyNumber expansion() const;

private:
    std::uint8_t digit_;
};

enum class Verdict { accept, reject };

// Uniform over 0000..9999. No cross-user uniqueness is enforced.
KeyNumber generate_key(EntropySource& entropy);

// Iterated decimal digit sum of the day until one digit remains (1..9).
std::uint8_t digital_root(DayOfMonth day);

RepeatedDigitKey repeat_digit(std::uint8_t digit);

// Digit-wise (original + r) mod 10 where r = digital_root(day). No carries.
KeyNumber encode_ssr(const KeyNumber& original, DayOfMonth day);

// Digit-wise (entered - r) mod 10; the inverse of encode_ssr for the same day.
KeyNumber decode_ssr(const KeyNumber& entered, DayOfMonth day);

// Accepts either the stored key itself or its SSR form for `day`.
Verdict verify_key(const KeyNumber& entered, const KeyNumber& stored, DayOfMonth day);

} // namespace gridauth
