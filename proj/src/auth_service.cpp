#include "gridauth/auth_service.hpp"

#include "gridauth/encoding.hpp"
#include "gridauth/entropy.hpp"

#include <algorithm>
#include <array>

namespace gridauth {

std::string_view to_string(SessionStatus s) {
    switch (s) {
    case SessionStatus::in_progress: return "in_progress";
    case SessionStatus::succeeded: return "succeeded";
    case SessionStatus::failed: return "failed";
    case SessionStatus::expired: return "expired";
    }
    return "unknown";
}

std::optional<SessionStatus> parse_session_status(std::string_view s) {
    for (auto st : {SessionStatus::in_progress, SessionStatus::succeeded, SessionStatus::failed,
                    SessionStatus::expired}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    return std::nullopt;
}

AuthService::AuthService(AccountsStore& store, const Clock& clock, EntropySource& entropy, ServiceConfig config)
    : store_(store), clock_(clock), entropy_(entropy), config_(config) {
    if (config_.session_ttl.count() <= 0) {
        throw ConfigError("session TTL must be positive");
    }
}

DayOfMonth AuthService::current_day() const {
    return day_of_month(clock_.now(), config_.timezone);
}

GridLayout AuthService::fresh_layout() {
    std::lock_guard lock(entropy_mutex_);
    return generate_layout(entropy_);
}

std::string AuthService::fresh_session_id() {
    std::array<std::uint8_t, 16> raw{};
    {
        std::lock_guard lock(entropy_mutex_);
        entropy_.fill(std::as_writable_bytes(std::span(raw)));
    }
    return hex_encode(raw);
}

KeyNumber AuthService::register_user(std::string_view username) {
    if (!Username::is_valid(username)) {
        throw ApiError(400, "username must be 3-32 letters or digits");
    }
    try {
        std::lock_guard lock(entropy_mutex_);
        return store_.register_user(Username(std::string(username)), entropy_, clock_.now());
    } catch (const ConflictError&) {
        throw ApiError(409, "username already registered");
    } catch (const EntropyError&) {
        throw ApiError(500, "entropy failure");
    } catch (const StorageError&) {
        throw ApiError(500, "storage failure");
    }
}

void AuthService::purge(TimePoint now) {
    // Keep finished sessions readable for one extra TTL, then drop them.
    std::lock_guard lock(sessions_mutex_);
    std::erase_if(sessions_, [&](const auto& kv) { return now >= kv.second->session.expires_at + config_.session_ttl; });
}

SessionCreated AuthService::create_session(std::string_view username) {
    if (!Username::is_valid(username)) {
        throw ApiError(400, "username must be 3-32 letters or digits");
    }
    const TimePoint now = clock_.now();
    purge(now);

    Username name{std::string(username)};
    const auto record = store_.lookup(name);
    if (record && record->locked_until && now < *record->locked_until) {
        const auto wait = std::chrono::duration_cast<std::chrono::seconds>(*record->locked_until - now).count();
        throw ApiError(423, "account locked", wait);
    }

    auto entry = std::make_shared<Entry>(LoginSession{
        .session_id = fresh_session_id(),
        .username = std::move(name),
        .decoy = !record.has_value(),
        .entries = {},
        .layout = fresh_layout(),
        .status = SessionStatus::in_progress,
        .created_at = now,
        .expires_at = now + config_.session_ttl,
    });
    SessionCreated out{entry->session.session_id, entry->session.layout};
    {
        std::lock_guard lock(sessions_mutex_);
        sessions_.emplace(out.session_id, std::move(entry));
    }
    return out;
}

std::shared_ptr<AuthService::Entry> AuthService::find(std::string_view session_id) const {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        throw ApiError(404, "unknown session");
    }
    return it->second;
}

namespace {

void expire_if_due(LoginSession& s, TimePoint now) {
    if (s.status == SessionStatus::in_progress && now >= s.expires_at) {
        s.status = SessionStatus::expired;
    }
}

} // namespace

void AuthService::finish(LoginSession& session, TimePoint now) {
    const DayOfMonth day = day_of_month(now, config_.timezone);
    const bool has_garbage =
        std::any_of(session.entries.begin(), session.entries.end(), [](const auto& e) { return !e.has_value(); });

    KeyNumber::Digits digits{};
    for (std::size_t i = 0; i < kKeyLength; ++i) {
        digits[i] = session.entries[i].value_or(0);
    }
    const KeyNumber entered = KeyNumber::from_digits(digits);

    if (session.decoy) {
        // Same arithmetic as a real attempt; the outcome is fixed.
        static const KeyNumber unreachable = KeyNumber::from_value(0);
        (void)verify_key(entered, unreachable, day);
        session.status = SessionStatus::failed;
        return;
    }

    AttemptOutcome outcome = AttemptOutcome::rejected;
    try {
        outcome = store_.settle_attempt(session.username, now, [&](const KeyNumber& stored) {
            return !has_garbage && verify_key(entered, stored, day) == Verdict::accept;
        });
    } catch (const NotFoundError&) {
        outcome = AttemptOutcome::rejected;
    } catch (const Error&) {
        session.status = SessionStatus::failed;
        throw ApiError(500, "verification failure");
    }
    // A lock that began after this session opened still blocks verification.
    session.status = outcome == AttemptOutcome::accepted ? SessionStatus::succeeded : SessionStatus::failed;
}

ClickReply AuthService::click(std::string_view session_id, int row, int col) {
    const auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    LoginSession& s = entry->session;
    const TimePoint now = clock_.now();
    expire_if_due(s, now);

    if (s.status == SessionStatus::expired) {
        throw ApiError(410, "session expired");
    }
    if (s.status != SessionStatus::in_progress) {
        throw ApiError(409, "session already finished");
    }
    if (row < 0 || row >= kGridSize || col < 0 || col >= kGridSize) {
        throw ApiError(400, "row and col must be in 0-9");
    }

    // Resolve against the layout that was on screen, then reshuffle.
    const ClickResult result = resolve_click(s.layout, row, col);
    if (result.kind() == ClickResult::Kind::header_cell) {
        throw ApiError(400, "header row is not clickable");
    }
    s.entries.push_back(result.digit());

    ClickReply reply;
    reply.entered = static_cast<int>(s.entries.size());
    if (s.entries.size() < kKeyLength) {
        s.layout = fresh_layout();
        reply.layout = s.layout;
        reply.status = s.status;
        return reply;
    }
    finish(s, now);
    reply.status = s.status;
    return reply;
}

SessionSnapshot AuthService::get_session(std::string_view session_id) {
    const auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    expire_if_due(entry->session, clock_.now());
    return SessionSnapshot{entry->session.status, static_cast<int>(entry->session.entries.size())};
}

std::size_t AuthService::live_sessions() const {
    std::lock_guard lock(sessions_mutex_);
    return sessions_.size();
}

} // namespace gridauth
