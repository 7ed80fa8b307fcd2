#include "gridauth/ssr_key.hpp"

#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"

namespace gridauth {

KeyNumber KeyNumber::from_digits(const Digits& digits) {
    for (std::uint8_t d : digits) {
        if (d > 9) {
            throw ValidationError("key digit out of range 0-9");
        }
    }
    return KeyNumber(digits);
}

KeyNumber KeyNumber::from_value(int value) {
    if (value < 0 || value > 9999) {
        throw ValidationError("key value out of range 0-9999");
    }
    Digits d{};
    for (int i = 3; i >= 0; --i) {
        d[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value % 10);
        value /= 10;
    }
    return KeyNumber(d);
}

KeyNumber KeyNumber::parse(std::string_view text) {
    if (text.size() != 4) {
        throw ValidationError("key must be exactly 4 digits");
    }
    Digits d{};
    for (std::size_t i = 0; i < 4; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') {
            throw ValidationError("key must be exactly 4 digits");
        }
        d[i] = static_cast<std::uint8_t>(c - '0');
    }
    return KeyNumber(d);
}

int KeyNumber::value() const {
    int v = 0;
    for (std::uint8_t d : digits_) {
        v = v * 10 + d;
    }
    return v;
}

std::string KeyNumber::to_string() const {
    std::string s(4, '0');
    for (std::size_t i = 0; i < 4; ++i) {
        s[i] = static_cast<char>('0' + digits_[i]);
    }
    return s;
}

DayOfMonth::DayOfMonth(int day) : day_(day) {
    if (day < 1 || day > 31) {
        throw ValidationError("day of month out of range 1-31");
    }
}

RepeatedDigitKey::RepeatedDigitKey(std::uint8_t digit) : digit_(digit) {
    if (digit > 9) {
        throw ValidationError("repeated digit out of range 0-9");
    }
}

KeyNumber RepeatedDigitKey::expansion() const {
    return KeyNumber::from_digits({digit_, digit_, digit_, digit_});
}

KeyNumber generate_key(EntropySource& entropy) {
    return KeyNumber::from_value(static_cast<int>(entropy.uniform(10000)));
}

std::uint8_t digital_root(DayOfMonth day) {
    int n = day.value();
    while (n > 9) {
        int sum = 0;
        for (; n > 0; n /= 10) {
            sum += n % 10;
        }
        n = sum;
    }
    return static_cast<std::uint8_t>(n);
}

RepeatedDigitKey repeat_digit(std::uint8_t digit) {
    return RepeatedDigitKey(digit);
}

KeyNumber encode_ssr(const KeyNumber& original, DayOfMonth day) {
    const KeyNumber shift = repeat_digit(digital_root(day)).expansion();
    KeyNumber::Digits out{};
    for (std::size_t i = 0; i < 4; ++i) {
        // Keep only the least significant digit of each position's sum.
        out[i] = static_cast<std::uint8_t>((original.digit(i) + shift.digit(i)) % 10);
    }
    return KeyNumber::from_digits(out);
}

KeyNumber decode_ssr(const KeyNumber& entered, DayOfMonth day) {
    const KeyNumber shift = repeat_digit(digital_root(day)).expansion();
    KeyNumber::Digits out{};
    for (std::size_t i = 0; i < 4; ++i) {
        int minuend = entered.digit(i);
        const int subtrahend = shift.digit(i);
        if (minuend < subtrahend) {
            minuend += 10;
        }
        out[i] = static_cast<std::uint8_t>(minuend - subtrahend);
    }
    return KeyNumber::from_digits(out);
}

Verdict verify_key(const KeyNumber& entered, const KeyNumber& stored, DayOfMonth day) {
    if (entered == stored || decode_ssr(entered, day) == stored) {
        return Verdict::accept;
    }
    return Verdict::reject;
}

} // namespace gridauth
