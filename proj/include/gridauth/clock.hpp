#pragma once

#include "gridauth/ssr_key.hpp"

#include <atomic>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace gridauth {

using TimePoint = std::chrono::sys_seconds;

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
};

class SystemClock final : public Clock {
public:
    TimePoint now() const override;
};

// Manually driven clock for tests and model-time simulations.
class MockClock final : public Clock {
public:
    explicit MockClock(TimePoint start) : seconds_(start.time_since_epoch().count()) {}

    TimePoint now() const override { return TimePoint{std::chrono::seconds{seconds_.load()}}; }
    void set(TimePoint t) { seconds_.store(t.time_since_epoch().count()); }
    void advance(std::chrono::seconds d) { seconds_.fetch_add(d.count()); }

private:
    std::atomic<std::int64_t> seconds_;
};

// Fixed offset from UTC that defines which calendar day the server is in.
// Accepted spellings: "UTC", "Z", "+05:30", "-0800", "UTC+6", "UTC-03:00".
class UtcOffset {
public:
    constexpr UtcOffset() = default;
    constexpr explicit UtcOffset(std::chrono::minutes m) : minutes_(m) {}

    static UtcOffset parse(std::string_view text);

    constexpr std::chrono::minutes minutes() const { return minutes_; }
    std::string to_string() const;

private:
    std::chrono::minutes minutes_{0};
};

std::chrono::year_month_day local_date(TimePoint t, UtcOffset offset);

// Day-of-month at instant t in the given zone. Used for SSR decoding.
DayOfMonth day_of_month(TimePoint t, UtcOffset offset);

// RFC 3339 in UTC with second precision, e.g. "2026-10-19T08:30:00Z".
std::string format_rfc3339(TimePoint t);
std::optional<TimePoint> parse_rfc3339(std::string_view text);

} // namespace gridauth
