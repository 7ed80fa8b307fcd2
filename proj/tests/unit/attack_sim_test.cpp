#include "gridauth/attack_sim.hpp"
#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gridauth;
using namespace gridauth::testing;
using namespace std::chrono_literals;

TEST_CASE("login traces follow the entry procedure") {
    SeededEntropy e(6431);
    const auto key = KeyNumber::parse("6431");
    for (int t = 0; t < 200; ++t) {
        const auto trace = simulate_login_trace(key, e);
        CHECK(resolve_click(trace.steps[0].layout, trace.steps[0].click.row, trace.steps[0].click.col).digit() == 6);
        KeyNumber::Digits replay{};
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& s = trace.steps[i];
            REQUIRE(s.click.row >= 1);
            REQUIRE(s.click.row <= 9);
            REQUIRE_FALSE(check_layout(s.layout).has_value());
            replay[i] = resolve_click(s.layout, s.click.row, s.click.col).digit().value();
        }
        REQUIRE(KeyNumber::from_digits(replay) == key);
    }
}

TEST_CASE("legitimate click choice is uniform over the three copies") {
    SeededEntropy e(1);
    const auto key = KeyNumber::parse("0000");
    std::array<int, 3> picks{};
    for (int t = 0; t < 9000; ++t) {
        const auto trace = simulate_login_trace(key, e);
        const auto& s = trace.steps[0];
        int rank = 0;
        for (int r = 1; r < 10; ++r) {
            for (int c = 0; c < 10; ++c) {
                if (resolve_click(s.layout, r, c).digit() == 0) {
                    if (r == s.click.row && c == s.click.col) ++picks[rank];
                    ++rank;
                }
            }
        }
    }
    for (int n : picks) CHECK(std::abs(n - 3000) < 200);
}

TEST_CASE("observer models") {
    SUBCASE("full snapshot always decodes") {
        const auto r = run_observer_trials({ObserverMode::full_snapshot, 0}, 5000, 1);
        CHECK(r.successes == 5000);
    }
    SUBCASE("k = 10 recalls the whole header") {
        const auto r = run_observer_trials({ObserverMode::k_cell_recall, 10}, 5000, 2);
        CHECK(r.successes == 5000);
        const auto big = run_observer_trials({ObserverMode::k_cell_recall, 50}, 500, 2);
        CHECK(big.successes == 500);
    }
    SUBCASE("click only sits at the guessing floor") {
        const auto r = run_observer_trials({ObserverMode::click_only, 0}, 100000, 7);
        const double rate = static_cast<double>(r.successes) / 1e5;
        CHECK(rate <= 4e-4);
        const auto ci = wilson_interval(r.successes, r.trials, 3.29);
        CHECK(ci.low <= 1e-4);
        CHECK(ci.high >= 1e-4);
    }
    SUBCASE("negative k is rejected") {
        CHECK_THROWS_AS(run_observer_trials({ObserverMode::k_cell_recall, -1}, 10, 1), ValidationError);
    }
}

TEST_CASE("k-cell recall matches its closed form and grows with k") {
    double previous_high = 0.0;
    double previous_rate = 0.0;
    for (int k : {0, 2, 4, 6, 8, 10}) {
        const ObserverModel m{ObserverMode::k_cell_recall, k};
        const auto r = run_observer_trials(m, 20000, 100 + static_cast<std::uint64_t>(k));
        const double rate = static_cast<double>(r.successes) / static_cast<double>(r.trials);
        const auto ci = wilson_interval(r.successes, r.trials, 3.29);
        const double p = std::pow(k / 10.0 + (1 - k / 10.0) / 10.0, 4);
        CHECK(observer_success_probability(m) == doctest::Approx(p));
        CHECK(ci.low <= p);
        CHECK(ci.high >= p);
        // Non-decreasing up to sampling noise.
        CHECK((rate >= previous_rate || ci.high >= previous_rate || previous_high >= ci.low));
        previous_rate = rate;
        previous_high = ci.high;
    }
}

TEST_CASE("observer trials are reproducible and schedule independent") {
    const ObserverModel m{ObserverMode::k_cell_recall, 4};
    const auto a = run_observer_trials(m, 3000, 42, 1);
    const auto b = run_observer_trials(m, 3000, 42, 3);
    const auto c = run_observer_trials(m, 3000, 43, 1);
    CHECK(a.successes == b.successes);
    CHECK(a.successes != c.successes);
}

TEST_CASE("sequential brute force against a known key") {
    MockClock clock{epoch_2026()};
    SeededEntropy entropy{3};
    AccountsStore store{store_key(), {}};
    AuthService service{store, clock, entropy};
    const auto key = service.register_user("victim");
    InProcessEndpoint ep(service);

    std::chrono::seconds waited{0};
    const auto report = bruteforce_attack(ep, "victim", {GuessOrder::sequential, 0, 0}, [&](std::chrono::seconds s) {
        waited += s;
        clock.advance(s);
    });
    const auto k = static_cast<std::uint64_t>(key.value());
    CHECK(report.success);
    CHECK(report.attempts == k + 1);
    CHECK(report.lockouts_hit == k / 5);
    CHECK(report.elapsed_model_time == std::chrono::seconds{1800 * static_cast<long>(k / 5)});
    CHECK(waited == report.elapsed_model_time);
    CHECK(report.max_attempts_per_window <= 5);
}

TEST_CASE("brute force is capped at threshold attempts per window") {
    MockClock clock{epoch_2026()};
    SeededEntropy entropy{4};
    AccountsStore store{store_key(), {}};
    AuthService service{store, clock, entropy};
    service.register_user("victim");
    InProcessEndpoint ep(service);

    const auto report = bruteforce_attack(ep, "victim", {GuessOrder::shuffled, 9, 3},
                                          [&](std::chrono::seconds s) { clock.advance(s); });
    CHECK(report.attempts <= 15);
    CHECK(report.max_attempts_per_window <= 5);
    if (!report.success) {
        CHECK(report.attempts == 15);
        CHECK(report.lockouts_hit == 3);
        CHECK(report.elapsed_model_time == 60min);
    }
}

TEST_CASE("lockout analytics") {
    const LockoutPolicy policy{};
    CHECK(keyspace_cover_time(policy) == std::chrono::seconds{2000 * 1800});
    CHECK(single_form_success_probability(policy, 1) == doctest::Approx(5e-4));
    CHECK(single_form_success_probability(policy, 100) == doctest::Approx(0.05));
    CHECK(single_form_success_probability(policy, 5000) == 1.0);
    // 1 - (K-N)(K-N-1)/(K(K-1)), K = 10000, evaluated offline.
    CHECK(bruteforce_success_probability(policy, 1) == doctest::Approx(0.000999799979997995));
    CHECK(bruteforce_success_probability(policy, 100) == doctest::Approx(0.09750475047504747));
    CHECK(bruteforce_success_probability(policy, 200) == doctest::Approx(0.19000900090008999));
    CHECK(bruteforce_success_probability(policy, 2000) == 1.0);
    CHECK(bruteforce_success_probability(policy, 5000) == 1.0);
}

namespace {

// Exact success probability of the sequential attacker in the trial harness,
// by enumeration over every victim key. Guess j is made at
// epoch + floor(j / threshold) * window and is accepted if it equals the key
// or the key's SSR form for that day.
double sequential_oracle(const LockoutPolicy& policy, std::uint64_t windows) {
    const std::uint64_t n = std::min<std::uint64_t>(10000, policy.threshold * windows);
    int hits = 0;
    for (int k = 0; k < 10000; ++k) {
        const auto key = KeyNumber::from_value(k);
        for (std::uint64_t j = 0; j < n; ++j) {
            const TimePoint t = kBruteforceEpoch + policy.window * static_cast<long>(j / policy.threshold);
            const auto day = day_of_month(t, UtcOffset{});
            if (static_cast<int>(j) == k || KeyNumber::from_value(static_cast<int>(j)) == encode_ssr(key, day)) {
                ++hits;
                break;
            }
        }
    }
    return hits / 10000.0;
}

} // namespace

TEST_CASE("simulated brute force agrees with the analytic models") {
    const LockoutPolicy policy{};
    const double sequential = sequential_oracle(policy, 100);
    CHECK(sequential > single_form_success_probability(policy, 100));

    const auto seq = run_bruteforce_trials(policy, GuessOrder::sequential, 100, 200, 17);
    auto ci = wilson_interval(seq.successes, seq.trials, 3.29);
    CHECK(ci.low <= sequential);
    CHECK(ci.high >= sequential);
    CHECK(seq.max_attempts_per_window <= 5);
    CHECK(seq.total_attempts <= 200 * 500);

    const auto shuf = run_bruteforce_trials(policy, GuessOrder::shuffled, 100, 200, 18);
    ci = wilson_interval(shuf.successes, shuf.trials, 3.29);
    CHECK(ci.low <= bruteforce_success_probability(policy, 100));
    CHECK(ci.high >= bruteforce_success_probability(policy, 100));
    CHECK(shuf.max_attempts_per_window <= 5);
}

TEST_CASE("Wilson interval") {
    const auto zero = wilson_interval(0, 100);
    CHECK(zero.low == 0.0);
    // Closed form at p = 0: z^2 / (n + z^2).
    const double z2 = 1.959963984540054 * 1.959963984540054;
    CHECK(zero.high == doctest::Approx(z2 / (100 + z2)));
    CHECK(zero.high > 0.0);

    const auto half = wilson_interval(50, 100);
    CHECK(half.low == doctest::Approx(0.40383).epsilon(1e-4));
    CHECK(half.high == doctest::Approx(0.59617).epsilon(1e-4));

    const auto all = wilson_interval(100, 100);
    CHECK(all.high == doctest::Approx(1.0));
    CHECK(all.low == doctest::Approx(100 / (100 + z2)));
}

TEST_CASE("CSV report") {
    std::vector<ReportRow> rows{to_report_row(ObserverResult{{ObserverMode::click_only, 0}, 1000, 0}),
                                to_report_row(ObserverResult{{ObserverMode::k_cell_recall, 4}, 1000, 45})};
    std::ostringstream a;
    write_csv(a, rows);
    const std::string csv = a.str();
    CHECK(csv.rfind("model,k,trials,successes,rate,ci_low,ci_high\n", 0) == 0);
    CHECK(csv.find("\nclick-only,0,1000,0,0.00000000,0.00000000,0.00382") != std::string::npos);
    CHECK(csv.find("\nk-cell-recall,4,1000,45,0.04500000,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    std::ostringstream b;
    write_csv(b, rows);
    CHECK(a.str() == b.str());

    std::ostringstream summary;
    write_summary(summary, rows);
    CHECK(summary.str().find("click-only") != std::string::npos);
}

TEST_CASE("model names") {
    CHECK(parse_observer_mode("click-only") == ObserverMode::click_only);
    CHECK(parse_observer_mode("full_snapshot") == ObserverMode::full_snapshot);
    CHECK(parse_observer_mode("k-cell-recall") == ObserverMode::k_cell_recall);
    CHECK_THROWS_AS(parse_observer_mode("psychic"), ValidationError);
    CHECK(parse_guess_order("shuffled") == GuessOrder::shuffled);
    CHECK_THROWS_AS(parse_guess_order("smart"), ValidationError);
}
