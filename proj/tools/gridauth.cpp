// gridauth: serve the image-grid login API, administer the store, log in
// headlessly, run attack simulations and the built-in self test.
//
// Exit codes: 0 success, 1 authentication failed, 2 configuration or usage
// error, 3 account locked, 4 transport error.

#include "gridauth/accounts_store.hpp"
#include "gridauth/attack_sim.hpp"
#include "gridauth/auth_service.hpp"
#include "gridauth/clock.hpp"
#include "gridauth/entropy.hpp"
#include "gridauth/error.hpp"
#include "gridauth/http_api.hpp"
#include "gridauth/selftest.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <thread>

namespace {

using namespace gridauth;

enum ExitCode : int {
    kOk = 0,
    kAuthFailed = 1,
    kConfigError = 2,
    kLocked = 3,
    kTransportError = 4,
};

struct StoreFlags {
    std::string path = "users.db";
    std::string key_hex;
    int lockout_threshold = 5;
    int lockout_window_s = 1800;
};

struct ServeFlags {
    std::string host = "0.0.0.0";
    int port = 8080;
    int session_ttl_s = 120;
    std::string timezone = "UTC";
};

struct LoginFlags {
    std::string username;
    std::string key;
    bool ssr = false;
    std::string server = "127.0.0.1:8080";
    std::string timezone = "UTC";
};

struct RegisterFlags {
    std::string username;
    std::string server; // empty: write the local store
};

struct ObserverFlags {
    std::string model = "click-only";
    std::vector<int> k{0};
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string format = "csv";
    std::string output;
};

struct BruteforceFlags {
    std::string order = "sequential";
    std::uint64_t windows = 100;
    std::uint64_t trials = 200;
    std::uint64_t seed = 1;
    int lockout_threshold = 5;
    int lockout_window_s = 1800;
    std::string format = "csv";
    std::string output;
};

void add_store_flags(CLI::App* cmd, StoreFlags& f, bool lockout) {
    cmd->add_option("--store", f.path, "Path of the encrypted user store")->envname("GRIDAUTH_STORE_PATH");
    cmd->add_option("--store-key", f.key_hex, "128-bit store key as 32 hex characters")
        ->envname("GRIDAUTH_STORE_KEY");
    if (lockout) {
        cmd->add_option("--lockout-threshold", f.lockout_threshold, "Failed logins before lockout")
            ->envname("GRIDAUTH_LOCKOUT_THRESHOLD")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--lockout-window", f.lockout_window_s, "Lockout duration in seconds")
            ->envname("GRIDAUTH_LOCKOUT_WINDOW")
            ->check(CLI::NonNegativeNumber);
    }
}

std::unique_ptr<AccountsStore> open_store(const StoreFlags& f) {
    if (f.key_hex.empty()) {
        throw ConfigError("no store key: set GRIDAUTH_STORE_KEY or pass --store-key");
    }
    const StoreKey key = StoreKey::from_hex(f.key_hex);
    return std::make_unique<AccountsStore>(
        key, AccountsStore::Options{f.path, LockoutPolicy{f.lockout_threshold, std::chrono::seconds{f.lockout_window_s}}});
}

std::pair<std::string, int> split_host_port(const std::string& s) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) {
        throw ConfigError("server must be HOST:PORT");
    }
    try {
        return {s.substr(0, colon), std::stoi(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError("server must be HOST:PORT");
    }
}

int run_serve(const StoreFlags& sf, const ServeFlags& f) {
    // Signals are consumed by a dedicated thread via sigwait.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto store = open_store(sf);
    SystemClock clock;
    SystemEntropy entropy;
    AuthService service(*store, clock, entropy,
                        ServiceConfig{std::chrono::seconds{f.session_ttl_s}, UtcOffset::parse(f.timezone)});

    httplib::Server server;
    mount_routes(server, service);
    if (!server.bind_to_port(f.host, f.port)) {
        std::cerr << "gridauth: cannot listen on " << f.host << ':' << f.port << '\n';
        return kConfigError;
    }

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });

    std::cerr << "gridauth: listening on " << f.host << ':' << f.port << " (store " << sf.path << ", "
              << store->size() << " users, day zone " << UtcOffset::parse(f.timezone).to_string() << ")"
              << std::endl;
    server.listen_after_bind();

    // listen_after_bind returns once stop() ran and workers finished.
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    store->flush();
    std::cerr << "gridauth: shut down cleanly" << std::endl;
    return kOk;
}

int run_register(const StoreFlags& sf, const RegisterFlags& f) {
    if (!f.server.empty()) {
        const auto [host, port] = split_host_port(f.server);
        HttpEndpoint client(host, port);
        std::cout << client.register_user(f.username).to_string() << std::endl;
        return kOk;
    }
    auto store = open_store(sf);
    SystemEntropy entropy;
    SystemClock clock;
    const auto key = store->register_user(Username(f.username), entropy, clock.now());
    std::cout << key.to_string() << std::endl;
    return kOk;
}

int run_login(const LoginFlags& f) {
    KeyNumber entry = KeyNumber::parse(f.key);
    if (f.ssr) {
        entry = encode_ssr(entry, day_of_month(SystemClock{}.now(), UtcOffset::parse(f.timezone)));
    }
    const auto [host, port] = split_host_port(f.server);
    HttpEndpoint client(host, port);
    const auto result = headless_login(client, f.username, entry);
    switch (result.outcome) {
    case LoginOutcome::succeeded: std::cout << "succeeded" << std::endl; return kOk;
    case LoginOutcome::failed: std::cout << "failed" << std::endl; return kAuthFailed;
    case LoginOutcome::locked:
        std::cout << "locked (retry after " << result.retry_after_seconds << " s)" << std::endl;
        return kLocked;
    }
    return kTransportError;
}

// Writes to --output when given, stdout otherwise.
template <typename Fn>
int with_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return kOk;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write " + path);
    }
    fn(out);
    return kOk;
}

int run_observer(const ObserverFlags& f) {
    const ObserverMode mode = parse_observer_mode(f.model);
    std::vector<ReportRow> rows;
    const std::vector<int> ks = mode == ObserverMode::k_cell_recall ? f.k : std::vector<int>{0};
    for (int k : ks) {
        if (k < 0) {
            throw ValidationError("--k must be non-negative");
        }
        rows.push_back(to_report_row(run_observer_trials({mode, k}, f.trials, f.seed, f.threads)));
    }
    return with_output(f.output, [&](std::ostream& out) {
        if (f.format == "table") {
            write_summary(out, rows);
        } else {
            write_csv(out, rows);
        }
    });
}

int run_bruteforce(const BruteforceFlags& f) {
    const LockoutPolicy policy{f.lockout_threshold, std::chrono::seconds{f.lockout_window_s}};
    const GuessOrder order = parse_guess_order(f.order);
    const auto result = run_bruteforce_trials(policy, order, f.windows, f.trials, f.seed);
    const std::vector<ReportRow> rows{to_report_row(result, order, policy)};
    return with_output(f.output, [&](std::ostream& out) {
        if (f.format == "table") {
            write_summary(out, rows);
            const auto cover = keyspace_cover_time(policy);
            out << "max attempts in any window: " << result.max_attempts_per_window << " (threshold "
                << policy.threshold << ")\n"
                << "model time to cover all 10000 keys: " << cover.count() << " s ("
                << std::chrono::duration_cast<std::chrono::hours>(cover).count() << " h)\n";
        } else {
            write_csv(out, rows);
        }
    });
}

int run_selftest_cmd() {
    const auto start = std::chrono::steady_clock::now();
    const auto report = run_selftest();
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    std::cout << "ssr round trip: " << report.ssr_cases << " cases\n"
              << "layout composition: " << report.layout_cases << " layouts\n"
              << "elapsed: " << ms << " ms\n";
    if (!report.passed) {
        std::cout << "FAIL: " << report.first_failure << std::endl;
        return kAuthFailed;
    }
    std::cout << "PASS" << std::endl;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Image-grid password authentication service"};
    app.require_subcommand(1);

    StoreFlags store_flags;
    ServeFlags serve_flags;
    LoginFlags login_flags;
    RegisterFlags register_flags;
    ObserverFlags observer_flags;
    BruteforceFlags brute_flags;

    auto* serve = app.add_subcommand("serve", "Run the HTTP login service");
    add_store_flags(serve, store_flags, true);
    serve->add_option("--host", serve_flags.host, "Bind address")->envname("GRIDAUTH_HOST");
    serve->add_option("--port", serve_flags.port, "Listen port")->envname("GRIDAUTH_PORT")->check(CLI::Range(1, 65535));
    serve->add_option("--session-ttl", serve_flags.session_ttl_s, "Login session lifetime in seconds")
        ->envname("GRIDAUTH_SESSION_TTL")
        ->check(CLI::PositiveNumber);
    serve->add_option("--timezone", serve_flags.timezone, "Zone defining the current day (UTC, +HH:MM)")
        ->envname("GRIDAUTH_TIMEZONE");
    serve->set_config("--config", "", "TOML/INI config file");

    auto* reg = app.add_subcommand("register", "Register a user and print the issued key once");
    add_store_flags(reg, store_flags, false);
    reg->add_option("username", register_flags.username, "3-32 letters or digits")->required();
    reg->add_option("--server", register_flags.server, "Register through a running service at HOST:PORT");

    auto* login = app.add_subcommand("login", "Log in headlessly by clicking the grid through the API");
    login->add_option("username", login_flags.username)->required();
    login->add_option("--key", login_flags.key, "Four-digit key")->required();
    login->add_flag("--ssr", login_flags.ssr, "Enter the shoulder-surfing resistant form for today");
    login->add_option("--server", login_flags.server, "HOST:PORT")->envname("GRIDAUTH_SERVER");
    login->add_option("--timezone", login_flags.timezone, "Zone defining today for --ssr")
        ->envname("GRIDAUTH_TIMEZONE");

    auto* simulate = app.add_subcommand("simulate", "Run attack simulations");
    simulate->require_subcommand(1);
    auto* observer = simulate->add_subcommand("observer", "Shoulder-surfing observer models");
    observer->add_option("--model", observer_flags.model, "full-snapshot | click-only | k-cell-recall");
    observer->add_option("--k", observer_flags.k, "Header cells memorized per step (comma list allowed)")
        ->delimiter(',');
    observer->add_option("--trials", observer_flags.trials)->check(CLI::PositiveNumber);
    observer->add_option("--seed", observer_flags.seed);
    observer->add_option("--threads", observer_flags.threads, "0: hardware concurrency");
    observer->add_option("--format", observer_flags.format)->check(CLI::IsMember({"csv", "table"}));
    observer->add_option("--output", observer_flags.output, "Write to file instead of stdout");

    auto* brute = simulate->add_subcommand("bruteforce", "Exhaustive guessing against the lockout policy");
    brute->add_option("--order", brute_flags.order, "sequential | shuffled");
    brute->add_option("--windows", brute_flags.windows, "Lockout windows the attacker may spend")
        ->check(CLI::PositiveNumber);
    brute->add_option("--trials", brute_flags.trials)->check(CLI::PositiveNumber);
    brute->add_option("--seed", brute_flags.seed);
    brute->add_option("--lockout-threshold", brute_flags.lockout_threshold)->check(CLI::PositiveNumber);
    brute->add_option("--lockout-window", brute_flags.lockout_window_s)->check(CLI::NonNegativeNumber);
    brute->add_option("--format", brute_flags.format)->check(CLI::IsMember({"csv", "table"}));
    brute->add_option("--output", brute_flags.output);

    auto* selftest = app.add_subcommand("selftest", "Exhaustive SSR round trip and layout checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*serve) return run_serve(store_flags, serve_flags);
        if (*reg) return run_register(store_flags, register_flags);
        if (*login) return run_login(login_flags);
        if (*observer) return run_observer(observer_flags);
        if (*brute) return run_bruteforce(brute_flags);
        if (*selftest) return run_selftest_cmd();
    } catch (const ConfigError& e) {
        std::cerr << "gridauth: " << e.what() << '\n';
        return kConfigError;
    } catch (const ValidationError& e) {
        std::cerr << "gridauth: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConflictError& e) {
        std::cerr << "gridauth: " << e.what() << '\n';
        return kAuthFailed;
    } catch (const ApiError& e) {
        std::cerr << "gridauth: server replied " << e.status() << ": " << e.what() << '\n';
        return e.status() == 409 ? kAuthFailed : e.status() == 400 ? kConfigError : kTransportError;
    } catch (const TransportError& e) {
        std::cerr << "gridauth: " << e.what() << '\n';
        return kTransportError;
    } catch (const StorageError& e) {
        std::cerr << "gridauth: " << e.what() << '\n';
        return kConfigError;
    } catch (const AuthenticationError& e) {
        std::cerr << "gridauth: store does not open with this key: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "gridauth: " << e.what() << '\n';
        return kTransportError;
    }
    return kConfigError;
}
