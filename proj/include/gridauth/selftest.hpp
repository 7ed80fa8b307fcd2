#pragma once

#include "gridauth/ssr_key.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace gridauth {

struct SelftestHooks {
    using Transform = std::function<KeyNumber(const KeyNumber&, DayOfMonth)>;

    // Replaceable so a deliberately broken transform can prove the check bites.
    Transform encode = encode_ssr;
    Transform decode = decode_ssr;
    std::uint64_t layout_seed = 1;
    int layout_count = 1000;
};

struct SelftestReport {
    bool passed = true;
    std::uint64_t ssr_cases = 0;
    std::uint64_t layout_cases = 0;
    std::string first_failure; // empty when passed
};

// Exhaustive SSR round trip over 10 000 keys x 31 days, then composition
// checks on freshly generated layouts. Stops at the first counterexample.
SelftestReport run_selftest(const SelftestHooks& hooks = {});

} // namespace gridauth
