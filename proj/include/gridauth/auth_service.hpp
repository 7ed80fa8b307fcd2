#pragma once

#include "gridauth/accounts_store.hpp"
#include "gridauth/clock.hpp"
#include "gridauth/error.hpp"
#include "gridauth/grid.hpp"
#include "gridauth/ssr_key.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridauth {

class EntropySource;

enum class SessionStatus { in_progress, succeeded, failed, expired };

std::string_view to_string(SessionStatus s);
std::optional<SessionStatus> parse_session_status(std::string_view s);

// Error carrying the HTTP status it maps to.
class ApiError : public Error {
public:
    ApiError(int status, const std::string& message, std::optional<std::int64_t> retry_after = std::nullopt)
        : Error(message), status_(status), retry_after_(retry_after) {}

    int status() const { return status_; }
    std::optional<std::int64_t> retry_after_seconds() const { return retry_after_; }

private:
    int status_;
    std::optional<std::int64_t> retry_after_;
};

struct ServiceConfig {
    std::chrono::seconds session_ttl{120};
    UtcOffset timezone; // defines "today" for SSR decoding
};

inline constexpr std::size_t kKeyLength = 4;

struct LoginSession {
    std::string session_id;
    Username username;
    bool decoy = false; // issued for an unknown username; never succeeds
    // One slot per accepted click; nullopt marks a garbage image.
    std::vector<std::optional<std::uint8_t>> entries;
    GridLayout layout;
    SessionStatus status = SessionStatus::in_progress;
    TimePoint created_at{};
    TimePoint expires_at{};
};

struct SessionCreated {
    std::string session_id;
    GridLayout layout;
};

struct ClickReply {
    int entered = 0;
    SessionStatus status = SessionStatus::in_progress;
    std::optional<GridLayout> layout; // absent once the session is terminal
};

struct SessionSnapshot {
    SessionStatus status = SessionStatus::in_progress;
    int entered = 0;
};

// Login protocol state machine, independent of transport.
//
//   create_session -> click x4 -> verify -> succeeded | failed
//
// Each click is resolved against the layout the client was shown, then a
// fresh layout is drawn. Header-row clicks are refused without consuming a
// slot; garbage clicks consume a slot and make the attempt fail. The 4th
// click verifies the entry (raw key or SSR form for the server's current day)
// and updates lockout bookkeeping. Every failure path throws ApiError.
class AuthService {
public:
    AuthService(AccountsStore& store, const Clock& clock, EntropySource& entropy, ServiceConfig config = {});

    AuthService(const AuthService&) = delete;
    AuthService& operator=(const AuthService&) = delete;

    KeyNumber register_user(std::string_view username);
    SessionCreated create_session(std::string_view username);
    ClickReply click(std::string_view session_id, int row, int col);
    SessionSnapshot get_session(std::string_view session_id);

    const ServiceConfig& config() const { return config_; }
    DayOfMonth current_day() const;
    std::size_t live_sessions() const;

private:
    struct Entry {
        explicit Entry(LoginSession s) : session(std::move(s)) {}
        std::mutex mutex;
        LoginSession session;
    };

    std::shared_ptr<Entry> find(std::string_view session_id) const;
    GridLayout fresh_layout();
    std::string fresh_session_id();
    void finish(LoginSession& session, TimePoint now);
    void purge(TimePoint now);

    AccountsStore& store_;
    const Clock& clock_;
    EntropySource& entropy_;
    std::mutex entropy_mutex_;
    ServiceConfig config_;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
};

} // namespace gridauth
