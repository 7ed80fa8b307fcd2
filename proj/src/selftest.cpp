#include "gridauth/selftest.hpp"

#include "gridauth/entropy.hpp"
#include "gridauth/grid.hpp"

namespace gridauth {

SelftestReport run_selftest(const SelftestHooks& hooks) {
    SelftestReport report;
    for (int value = 0; value <= 9999; ++value) {
        const KeyNumber key = KeyNumber::from_value(value);
        for (int d = 1; d <= 31; ++d) {
            const DayOfMonth day(d);
            const KeyNumber back = hooks.decode(hooks.encode(key, day), day);
            ++report.ssr_cases;
            if (back != key) {
                report.passed = false;
                report.first_failure = "ssr round trip failed: key=" + key.to_string() + " day=" +
                                       std::to_string(d) + " decoded=" + back.to_string();
                return report;
            }
        }
    }

    SeededEntropy entropy(hooks.layout_seed);
    for (int i = 0; i < hooks.layout_count; ++i) {
        const GridLayout layout = generate_layout(entropy);
        ++report.layout_cases;
        if (const auto problem = check_layout(layout)) {
            report.passed = false;
            report.first_failure = "layout " + std::to_string(i) + ": " + *problem;
            return report;
        }
    }
    return report;
}

} // namespace gridauth
