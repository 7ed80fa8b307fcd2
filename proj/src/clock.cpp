#include "gridauth/clock.hpp"

#include "gridauth/error.hpp"

#include <charconv>
#include <cstdio>

namespace gridauth {

TimePoint SystemClock::now() const {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

namespace {

bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

UtcOffset UtcOffset::parse(std::string_view text) {
    std::string_view rest = text;
    if (rest.starts_with("UTC")) {
        rest.remove_prefix(3);
    } else if (rest.starts_with("GMT")) {
        rest.remove_prefix(3);
    }
    if (rest.empty() || rest == "Z") {
        return UtcOffset{};
    }
    const char sign = rest.front();
    if (sign != '+' && sign != '-') {
        throw ConfigError("unrecognized timezone '" + std::string(text) + "' (use UTC or +HH:MM)");
    }
    rest.remove_prefix(1);

    int hours = 0;
    int mins = 0;
    bool ok = false;
    if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
        ok = parse_uint(rest.substr(0, colon), hours) && parse_uint(rest.substr(colon + 1), mins);
    } else if (rest.size() == 4) {
        ok = parse_uint(rest.substr(0, 2), hours) && parse_uint(rest.substr(2), mins);
    } else if (rest.size() <= 2) {
        ok = parse_uint(rest, hours);
    }
    if (!ok || hours > 14 || mins > 59) {
        throw ConfigError("unrecognized timezone '" + std::string(text) + "' (use UTC or +HH:MM)");
    }
    const std::chrono::minutes total{hours * 60 + mins};
    return UtcOffset{sign == '-' ? -total : total};
}

std::string UtcOffset::to_string() const {
    const auto m = minutes_.count();
    if (m == 0) {
        return "UTC";
    }
    const auto a = m < 0 ? -m : m;
    char buf[16];
    std::snprintf(buf, sizeof buf, "UTC%c%02d:%02d", m < 0 ? '-' : '+', static_cast<int>(a / 60),
                  static_cast<int>(a % 60));
    return buf;
}

std::chrono::year_month_day local_date(TimePoint t, UtcOffset offset) {
    return std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(t + offset.minutes())};
}

DayOfMonth day_of_month(TimePoint t, UtcOffset offset) {
    return DayOfMonth(static_cast<int>(static_cast<unsigned>(local_date(t, offset).day())));
}

std::string format_rfc3339(TimePoint t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::optional<TimePoint> parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != 't') ||
        text[13] != ':' || text[16] != ':' || (text[19] != 'Z' && text[19] != 'z')) {
        return std::nullopt;
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), mo) ||
        !parse_uint(text.substr(8, 2), d) || !parse_uint(text.substr(11, 2), h) ||
        !parse_uint(text.substr(14, 2), mi) || !parse_uint(text.substr(17, 2), s)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
        return std::nullopt;
    }
    return TimePoint{std::chrono::sys_days{ymd}} + std::chrono::hours{h} + std::chrono::minutes{mi} +
           std::chrono::seconds{s};
}

} // namespace gridauth
