#pragma once

#include "gridauth/accounts_store.hpp"
#include "gridauth/client.hpp"
#include "gridauth/grid.hpp"
#include "gridauth/ssr_key.hpp"

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridauth {

class EntropySource;

// ---------------------------------------------------------------------------
// Shoulder-surfing observers
// ---------------------------------------------------------------------------

struct TraceStep {
    GridLayout layout; // as displayed when the click was made
    CellRef click;
};

struct LoginTrace {
    std::array<TraceStep, kKeyLength> steps;
};

enum class ObserverMode {
    full_snapshot, // remembers every layout and click
    click_only,    // remembers only click coordinates
    k_cell_recall, // remembers the clicked image plus k header cells per step
};

std::string_view to_string(ObserverMode mode);
// Accepts "full-snapshot", "click-only", "k-cell-recall" (or underscores).
ObserverMode parse_observer_mode(std::string_view text);

struct ObserverModel {
    ObserverMode mode = ObserverMode::click_only;
    int k = 0; // header cells memorized per step; values above 10 act as 10
};

// A legitimate login: per digit, a fresh layout and a uniform choice among
// the three cells that resolve to it.
LoginTrace simulate_login_trace(const KeyNumber& key, EntropySource& entropy);

// The observer's best guess of the key from what it retained of `trace`.
// Throws ValidationError for k < 0.
KeyNumber observer_attack(const LoginTrace& trace, const ObserverModel& model, EntropySource& entropy);

// Closed-form success probability of observer_attack against a uniform key.
double observer_success_probability(const ObserverModel& model);

struct ObserverResult {
    ObserverModel model;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
};

// Trial i draws its key, trace and guesses from derive_seed(seed, i), so the
// result is the same for any thread count.
ObserverResult run_observer_trials(const ObserverModel& model, std::uint64_t trials, std::uint64_t seed,
                                   unsigned threads = 0);

// ---------------------------------------------------------------------------
// Brute force against the lockout policy
// ---------------------------------------------------------------------------

enum class GuessOrder { sequential, shuffled };

std::string_view to_string(GuessOrder order);
GuessOrder parse_guess_order(std::string_view text);

struct BruteforceOptions {
    GuessOrder order = GuessOrder::sequential;
    std::uint64_t seed = 0;  // for shuffled order
    std::uint64_t max_windows = 0; // 0: until success or keyspace exhausted
};

struct BruteforceReport {
    std::uint64_t attempts = 0;
    std::uint64_t lockouts_hit = 0;
    bool success = false;
    std::chrono::seconds elapsed_model_time{0};
    std::uint64_t max_attempts_per_window = 0;
    std::uint64_t windows_used = 0;
};

// Called with the server's retry-after when the account is locked. In a
// harness this advances a mock clock; against a live server it would sleep.
using WaitFn = std::function<void(std::chrono::seconds)>;

// Drives full login attempts (session + four clicks) through `endpoint`,
// waiting out each lockout, until a guess succeeds, the keyspace is exhausted
// or `max_windows` lockout windows have been spent.
BruteforceReport bruteforce_attack(LoginEndpoint& endpoint, std::string_view username,
                                   const BruteforceOptions& options, const WaitFn& wait);

// Model time an exhaustive attacker needs to cover all 10 000 keys:
// (10 000 / threshold) windows.
std::chrono::seconds keyspace_cover_time(const LockoutPolicy& policy);

// P(success within w windows) for a uniformly random victim key and a
// random guess order. Login accepts the raw key and its SSR form for the
// day, so every guess covers two keys.
double bruteforce_success_probability(const LockoutPolicy& policy, std::uint64_t windows);

// min(1, threshold * w / 10000): the figure if only the raw key were accepted.
double single_form_success_probability(const LockoutPolicy& policy, std::uint64_t windows);

// Mock-clock start of every run_bruteforce_trials trial.
inline const TimePoint kBruteforceEpoch{std::chrono::sys_days{std::chrono::year{2024} / 1 / 1}};

struct BruteforceTrialsResult {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t windows = 0;
    std::uint64_t total_attempts = 0;
    std::uint64_t max_attempts_per_window = 0;
};

// Each trial builds an in-process service (memory store, mock clock),
// registers a victim with a random key and attacks it for `windows` windows.
BruteforceTrialsResult run_bruteforce_trials(const LockoutPolicy& policy, GuessOrder order, std::uint64_t windows,
                                             std::uint64_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Wilson score interval; z = 1.959963984540054 gives 95 %.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

// For bruteforce rows, `k` holds the number of lockout windows.
struct ReportRow {
    std::string model;
    std::uint64_t k = 0;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::optional<double> analytic; // summary table only
};

ReportRow to_report_row(const ObserverResult& result);
ReportRow to_report_row(const BruteforceTrialsResult& result, GuessOrder order, const LockoutPolicy& policy);

// Header "model,k,trials,successes,rate,ci_low,ci_high", one line per row.
void write_csv(std::ostream& out, std::span<const ReportRow> rows);
// Aligned table for humans, including the analytic column where known.
void write_summary(std::ostream& out, std::span<const ReportRow> rows);

} // namespace gridauth
