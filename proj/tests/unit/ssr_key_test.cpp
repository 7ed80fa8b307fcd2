#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"
#include "gridauth/ssr_key.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

using namespace gridauth;

namespace {

// Independent oracles: operate on the decimal string, not on KeyNumber.

int oracle_digit_sum_until_single(int n) {
    std::string s = std::to_string(n);
    while (s.size() > 1) {
        int sum = 0;
        for (char c : s) sum += c - '0';
        s = std::to_string(sum);
    }
    return s[0] - '0';
}

std::string oracle_encode(const std::string& key, int day) {
    const int r = oracle_digit_sum_until_single(day);
    std::string out = key;
    for (auto& c : out) c = static_cast<char>('0' + ((c - '0') + r) % 10);
    return out;
}

std::string oracle_decode(const std::string& key, int day) {
    const int r = oracle_digit_sum_until_single(day);
    std::string out = key;
    for (auto& c : out) c = static_cast<char>('0' + ((c - '0') - r + 10) % 10);
    return out;
}

KeyNumber K(const char* s) { return KeyNumber::parse(s); }

} // namespace

TEST_CASE("KeyNumber parsing and rendering") {
    CHECK(K("0042").to_string() == "0042");
    CHECK(K("0042").value() == 42);
    CHECK(KeyNumber::from_value(7).to_string() == "0007");
    CHECK_THROWS_AS(KeyNumber::parse("123"), ValidationError);
    CHECK_THROWS_AS(KeyNumber::parse("12345"), ValidationError);
    CHECK_THROWS_AS(KeyNumber::parse("12a4"), ValidationError);
    CHECK_THROWS_AS(KeyNumber::from_value(10000), ValidationError);
    CHECK_THROWS_AS(KeyNumber::from_value(-1), ValidationError);
    CHECK_THROWS_AS(KeyNumber::from_digits({1, 2, 10, 4}), ValidationError);

    for (int v = 0; v <= 9999; ++v) {
        const auto k = KeyNumber::from_value(v);
        REQUIRE(KeyNumber::parse(k.to_string()) == k);
        REQUIRE(k.value() == v);
    }
}

TEST_CASE("DayOfMonth range") {
    CHECK_THROWS_AS(DayOfMonth(0), ValidationError);
    CHECK_THROWS_AS(DayOfMonth(32), ValidationError);
    CHECK(DayOfMonth(31).value() == 31);
}

TEST_CASE("digital_root") {
    CHECK(digital_root(DayOfMonth(5)) == 5);
    CHECK(digital_root(DayOfMonth(27)) == 9);
    CHECK(digital_root(DayOfMonth(29)) == 2);
    CHECK(digital_root(DayOfMonth(16)) == 7);

    for (int d = 1; d <= 31; ++d) {
        const int got = digital_root(DayOfMonth(d));
        CHECK(got == oracle_digit_sum_until_single(d));
        CHECK(got == 1 + (d - 1) % 9);
        CHECK(got >= 1);
        CHECK(got <= 9);
    }
}

TEST_CASE("repeat_digit") {
    CHECK(repeat_digit(7).expansion() == K("7777"));
    CHECK(repeat_digit(0).expansion() == K("0000"));
    CHECK(repeat_digit(1).expansion() == K("1111"));
    CHECK_THROWS_AS(repeat_digit(10), ValidationError);
}

TEST_CASE("encode_ssr / decode_ssr worked examples") {
    CHECK(encode_ssr(K("1241"), DayOfMonth(16)) == K("8918"));
    CHECK(decode_ssr(K("8918"), DayOfMonth(16)) == K("1241"));
    CHECK(encode_ssr(K("0000"), DayOfMonth(7)) == K("7777"));
    CHECK(decode_ssr(K("7777"), DayOfMonth(7)) == K("0000"));
    CHECK(encode_ssr(K("9999"), DayOfMonth(1)) == K("0000"));
    // Every day whose digits sum to 7 gives the same transform.
    CHECK(encode_ssr(K("1241"), DayOfMonth(7)) == K("8918"));
    CHECK(encode_ssr(K("1241"), DayOfMonth(25)) == K("8918"));
}

TEST_CASE("SSR agrees with string oracle and round-trips exhaustively") {
    int failures = 0;
    for (int v = 0; v <= 9999; ++v) {
        const auto k = KeyNumber::from_value(v);
        for (int d = 1; d <= 31; ++d) {
            const DayOfMonth day(d);
            const auto enc = encode_ssr(k, day);
            failures += enc.to_string() != oracle_encode(k.to_string(), d);
            failures += decode_ssr(k, day).to_string() != oracle_decode(k.to_string(), d);
            failures += decode_ssr(enc, day) != k;
            // Non-identity: every digit shifts by a nonzero amount.
            for (std::size_t i = 0; i < 4; ++i) {
                failures += enc.digit(i) == k.digit(i);
            }
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("SSR positions are independent") {
    SeededEntropy entropy(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto k = generate_key(entropy);
        const DayOfMonth day(1 + static_cast<int>(entropy.uniform(31)));
        const std::size_t pos = entropy.uniform(4);
        auto digits = k.digits();
        digits[pos] = static_cast<std::uint8_t>((digits[pos] + 1 + entropy.uniform(9)) % 10);
        const auto changed = KeyNumber::from_digits(digits);

        const auto a = encode_ssr(k, day);
        const auto b = encode_ssr(changed, day);
        for (std::size_t i = 0; i < 4; ++i) {
            if (i == pos) {
                REQUIRE(a.digit(i) != b.digit(i));
            } else {
                REQUIRE(a.digit(i) == b.digit(i));
            }
        }
    }
}

TEST_CASE("verify_key") {
    CHECK(verify_key(K("1241"), K("1241"), DayOfMonth(3)) == Verdict::accept);
    CHECK(verify_key(K("8918"), K("1241"), DayOfMonth(16)) == Verdict::accept);
    CHECK(verify_key(K("8918"), K("1241"), DayOfMonth(4)) == Verdict::reject);
    CHECK(oracle_decode("8918", 4) == "4574");
    CHECK(decode_ssr(K("8918"), DayOfMonth(4)) == K("4574"));
    CHECK(verify_key(K("1240"), K("1241"), DayOfMonth(16)) == Verdict::reject);

    for (int v = 0; v <= 9999; v += 37) {
        const auto k = KeyNumber::from_value(v);
        for (int d = 1; d <= 31; ++d) {
            REQUIRE(verify_key(k, k, DayOfMonth(d)) == Verdict::accept);
        }
    }
}

TEST_CASE("generate_key") {
    SUBCASE("fixed seed replays") {
        SeededEntropy a(1234);
        SeededEntropy b(1234);
        for (int i = 0; i < 20; ++i) {
            CHECK(generate_key(a) == generate_key(b));
        }
    }
    SUBCASE("system entropy yields valid keys") {
        SystemEntropy e;
        const auto k1 = generate_key(e);
        const auto k2 = generate_key(e);
        CHECK(k1.to_string().size() == 4);
        CHECK(k2.value() <= 9999);
    }
    SUBCASE("per-position digit frequencies are 0.1 +- 0.01") {
        SeededEntropy e(99);
        constexpr int samples = 100000;
        std::array<std::array<int, 10>, 4> counts{};
        for (int i = 0; i < samples; ++i) {
            const auto k = generate_key(e);
            for (std::size_t p = 0; p < 4; ++p) {
                ++counts[p][k.digit(p)];
            }
        }
        double chi2_worst = 0.0;
        for (const auto& pos : counts) {
            double chi2 = 0.0;
            for (int c : pos) {
                const double f = static_cast<double>(c) / samples;
                CHECK(std::abs(f - 0.1) <= 0.01);
                const double diff = c - samples / 10.0;
                chi2 += diff * diff / (samples / 10.0);
            }
            chi2_worst = std::max(chi2_worst, chi2);
        }
        // 9 degrees of freedom; p = 0.001 critical value is 27.88.
        CHECK(chi2_worst < 27.88);
    }
}
