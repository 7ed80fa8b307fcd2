#include "gridauth/attack_sim.hpp"

#include "gridauth/auth_service.hpp"
#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

namespace gridauth {

std::string_view to_string(ObserverMode mode) {
    switch (mode) {
    case ObserverMode::full_snapshot: return "full-snapshot";
    case ObserverMode::click_only: return "click-only";
    case ObserverMode::k_cell_recall: return "k-cell-recall";
    }
    return "unknown";
}

ObserverMode parse_observer_mode(std::string_view text) {
    std::string s(text);
    std::replace(s.begin(), s.end(), '_', '-');
    for (auto m : {ObserverMode::full_snapshot, ObserverMode::click_only, ObserverMode::k_cell_recall}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw ValidationError("unknown observer model '" + std::string(text) + "'");
}

LoginTrace simulate_login_trace(const KeyNumber& key, EntropySource& entropy) {
    LoginTrace trace;
    for (std::size_t i = 0; i < kKeyLength; ++i) {
        TraceStep& step = trace.steps[i];
        step.layout = generate_layout(entropy);

        std::array<CellRef, kCopiesPerImage - 1> candidates{};
        std::size_t n = 0;
        for (int r = 1; r < kGridSize; ++r) {
            for (int c = 0; c < kGridSize; ++c) {
                if (resolve_click(step.layout, r, c).digit() == key.digit(i)) {
                    candidates.at(n++) = CellRef{r, c};
                }
            }
        }
        step.click = candidates.at(entropy.uniform(static_cast<std::uint32_t>(n)));
    }
    return trace;
}

namespace {

std::uint8_t guess_digit(EntropySource& entropy) {
    return static_cast<std::uint8_t>(entropy.uniform(10));
}

ImageId clicked_image(const TraceStep& step) {
    return step.layout.cells[static_cast<std::size_t>(step.click.row)][static_cast<std::size_t>(step.click.col)];
}

} // namespace

KeyNumber observer_attack(const LoginTrace& trace, const ObserverModel& model, EntropySource& entropy) {
    if (model.k < 0) {
        throw ValidationError("observer k must be non-negative");
    }
    KeyNumber::Digits guess{};
    for (std::size_t i = 0; i < kKeyLength; ++i) {
        const TraceStep& step = trace.steps[i];
        switch (model.mode) {
        case ObserverMode::full_snapshot:
            guess[i] = header_index(step.layout, clicked_image(step)).value_or(0);
            break;
        case ObserverMode::click_only:
            // Coordinates say nothing once the layout is gone.
            guess[i] = guess_digit(entropy);
            break;
        case ObserverMode::k_cell_recall: {
            const int k = std::min(model.k, kGridSize);
            std::array<int, kGridSize> idx{};
            std::iota(idx.begin(), idx.end(), 0);
            for (int j = 0; j < k; ++j) {
                const auto pick = j + static_cast<int>(entropy.uniform(static_cast<std::uint32_t>(kGridSize - j)));
                std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
            }
            const auto target = header_index(step.layout, clicked_image(step));
            const bool remembered =
                target && std::find(idx.begin(), idx.begin() + k, static_cast<int>(*target)) != idx.begin() + k;
            guess[i] = remembered ? *target : guess_digit(entropy);
            break;
        }
        }
    }
    return KeyNumber::from_digits(guess);
}

double observer_success_probability(const ObserverModel& model) {
    switch (model.mode) {
    case ObserverMode::full_snapshot: return 1.0;
    case ObserverMode::click_only: return std::pow(0.1, kKeyLength);
    case ObserverMode::k_cell_recall: {
        const double known = std::clamp(model.k, 0, kGridSize) / static_cast<double>(kGridSize);
        return std::pow(known + (1.0 - known) * 0.1, kKeyLength);
    }
    }
    return 0.0;
}

ObserverResult run_observer_trials(const ObserverModel& model, std::uint64_t trials, std::uint64_t seed,
                                   unsigned threads) {
    if (model.k < 0) {
        throw ValidationError("observer k must be non-negative");
    }
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(trials, 1)));

    std::vector<std::uint64_t> hits(threads, 0);
    auto work = [&](unsigned t) {
        for (std::uint64_t i = t; i < trials; i += threads) {
            SeededEntropy entropy(derive_seed(seed, i));
            const KeyNumber key = generate_key(entropy);
            const LoginTrace trace = simulate_login_trace(key, entropy);
            if (observer_attack(trace, model, entropy) == key) {
                ++hits[t];
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) {
            pool.emplace_back(work, t);
        }
        work(0);
    }
    return ObserverResult{model, trials, std::accumulate(hits.begin(), hits.end(), std::uint64_t{0})};
}

std::string_view to_string(GuessOrder order) {
    return order == GuessOrder::sequential ? "sequential" : "shuffled";
}

GuessOrder parse_guess_order(std::string_view text) {
    if (text == "sequential") return GuessOrder::sequential;
    if (text == "shuffled") return GuessOrder::shuffled;
    throw ValidationError("unknown guess order '" + std::string(text) + "'");
}

BruteforceReport bruteforce_attack(LoginEndpoint& endpoint, std::string_view username,
                                   const BruteforceOptions& options, const WaitFn& wait) {
    std::vector<int> order(10000);
    std::iota(order.begin(), order.end(), 0);
    if (options.order == GuessOrder::shuffled) {
        SeededEntropy entropy(options.seed);
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            std::swap(order[i], order[entropy.uniform(static_cast<std::uint32_t>(i + 1))]);
        }
    }

    BruteforceReport report;
    report.windows_used = 1;
    std::uint64_t in_window = 0;
    std::size_t next = 0;
    while (next < order.size()) {
        const LoginResult result = headless_login(endpoint, username, KeyNumber::from_value(order[next]));
        if (result.outcome == LoginOutcome::locked) {
            ++report.lockouts_hit;
            report.max_attempts_per_window = std::max(report.max_attempts_per_window, in_window);
            in_window = 0;
            if (options.max_windows != 0 && report.windows_used >= options.max_windows) {
                break;
            }
            const std::chrono::seconds pause{std::max<std::int64_t>(result.retry_after_seconds, 1)};
            wait(pause);
            report.elapsed_model_time += pause;
            ++report.windows_used;
            continue;
        }
        ++report.attempts;
        ++in_window;
        ++next;
        if (result.outcome == LoginOutcome::succeeded) {
            report.success = true;
            break;
        }
    }
    report.max_attempts_per_window = std::max(report.max_attempts_per_window, in_window);
    return report;
}

std::chrono::seconds keyspace_cover_time(const LockoutPolicy& policy) {
    const auto windows = (10000 + policy.threshold - 1) / policy.threshold;
    return policy.window * windows;
}

double bruteforce_success_probability(const LockoutPolicy& policy, std::uint64_t windows) {
    // Each guess is accepted if it equals the key or the key's SSR form, so
    // a random order of N guesses misses both with
    // C(K-2, N) / C(K, N) = (K-N)(K-N-1) / (K(K-1)).
    constexpr double keys = 10000.0;
    const double n = std::min(keys, static_cast<double>(policy.threshold) * static_cast<double>(windows));
    return 1.0 - (keys - n) * (keys - n - 1.0) / (keys * (keys - 1.0));
}

double single_form_success_probability(const LockoutPolicy& policy, std::uint64_t windows) {
    return std::min(1.0, static_cast<double>(policy.threshold) * static_cast<double>(windows) / 10000.0);
}

BruteforceTrialsResult run_bruteforce_trials(const LockoutPolicy& policy, GuessOrder order, std::uint64_t windows,
                                             std::uint64_t trials, std::uint64_t seed) {
    // Fixed harness key; the store contents never leave the process.
    const StoreKey harness_key({0x67, 0x72, 0x69, 0x64, 0x61, 0x75, 0x74, 0x68, 0x2d, 0x73, 0x69, 0x6d, 0x2d,
                                0x6b, 0x65, 0x79});
    BruteforceTrialsResult out;
    out.trials = trials;
    out.windows = windows;
    for (std::uint64_t i = 0; i < trials; ++i) {
        SeededEntropy entropy(derive_seed(seed, i));
        MockClock clock(kBruteforceEpoch);
        AccountsStore store(harness_key, AccountsStore::Options{{}, policy});
        AuthService service(store, clock, entropy);
        service.register_user("victim");
        InProcessEndpoint endpoint(service);

        const BruteforceOptions options{order, derive_seed(seed ^ 0xa5a5a5a5a5a5a5a5ULL, i), windows};
        const auto report = bruteforce_attack(endpoint, "victim", options,
                                              [&clock](std::chrono::seconds s) { clock.advance(s); });
        out.successes += report.success ? 1 : 0;
        out.total_attempts += report.attempts;
        out.max_attempts_per_window = std::max(out.max_attempts_per_window, report.max_attempts_per_window);
    }
    return out;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) {
        return Interval{0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes == 0) out.low = 0.0;
    if (successes == trials) out.high = 1.0;
    return out;
}

ReportRow to_report_row(const ObserverResult& result) {
    return ReportRow{std::string(to_string(result.model.mode)),
                     static_cast<std::uint64_t>(result.model.mode == ObserverMode::k_cell_recall ? result.model.k : 0),
                     result.trials, result.successes, observer_success_probability(result.model)};
}

ReportRow to_report_row(const BruteforceTrialsResult& result, GuessOrder order, const LockoutPolicy& policy) {
    return ReportRow{"bruteforce-" + std::string(to_string(order)), result.windows, result.trials, result.successes,
                     bruteforce_success_probability(policy, result.windows)};
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8f", v);
    return buf;
}

} // namespace

void write_csv(std::ostream& out, std::span<const ReportRow> rows) {
    out << "model,k,trials,successes,rate,ci_low,ci_high\n";
    for (const auto& r : rows) {
        const double rate = r.trials ? static_cast<double>(r.successes) / static_cast<double>(r.trials) : 0.0;
        const auto ci = wilson_interval(r.successes, r.trials);
        out << r.model << ',' << r.k << ',' << r.trials << ',' << r.successes << ',' << fmt(rate) << ','
            << fmt(ci.low) << ',' << fmt(ci.high) << '\n';
    }
}

void write_summary(std::ostream& out, std::span<const ReportRow> rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %6s %10s %10s %12s %25s %12s\n", "model", "k", "trials", "successes",
                  "rate", "95% CI (Wilson)", "analytic");
    out << line;
    for (const auto& r : rows) {
        const double rate = r.trials ? static_cast<double>(r.successes) / static_cast<double>(r.trials) : 0.0;
        const auto ci = wilson_interval(r.successes, r.trials);
        char interval[64];
        std::snprintf(interval, sizeof interval, "[%.3e, %.3e]", ci.low, ci.high);
        char analytic[32] = "-";
        if (r.analytic) {
            std::snprintf(analytic, sizeof analytic, "%.3e", *r.analytic);
        }
        std::snprintf(line, sizeof line, "%-22s %6llu %10llu %10llu %12.3e %25s %12s\n", r.model.c_str(),
                      static_cast<unsigned long long>(r.k), static_cast<unsigned long long>(r.trials),
                      static_cast<unsigned long long>(r.successes), rate, interval, analytic);
        out << line;
    }
    out << "Observer models formalize bounded memory; legitimate clicks pick uniformly among the 3 copies "
           "(real users may favour nearby cells).\n";
}

} // namespace gridauth
