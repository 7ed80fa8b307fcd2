#pragma once

#include "gridauth/auth_service.hpp"
#include "gridauth/grid.hpp"
#include "gridauth/ssr_key.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace gridauth {

struct OpenedSession {
    std::string session_id;
    GridLayout layout;
};

struct LockedOut {
    std::int64_t retry_after_seconds = 0;
};

using SessionOpenResult = std::variant<OpenedSession, LockedOut>;

// The login half of the service API, as seen by a client. Implemented
// in-process over AuthService and remotely over HTTP.
class LoginEndpoint {
public:
    virtual ~LoginEndpoint() = default;

    // LockedOut for a locked account; other failures throw.
    virtual SessionOpenResult open_session(std::string_view username) = 0;
    virtual ClickReply click(std::string_view session_id, int row, int col) = 0;
};

class InProcessEndpoint final : public LoginEndpoint {
public:
    explicit InProcessEndpoint(AuthService& service) : service_(service) {}

    SessionOpenResult open_session(std::string_view username) override;
    ClickReply click(std::string_view session_id, int row, int col) override;

private:
    AuthService& service_;
};

struct CellRef {
    int row = 0;
    int col = 0;

    friend bool operator==(const CellRef&, const CellRef&) = default;
};

// First clickable cell (row-major, rows 1..9) that resolves to `digit`.
std::optional<CellRef> first_cell_for_digit(const GridLayout& layout, std::uint8_t digit);

// First clickable cell holding a garbage image.
std::optional<CellRef> first_garbage_cell(const GridLayout& layout);

enum class LoginOutcome { succeeded, failed, locked };

struct LoginResult {
    LoginOutcome outcome = LoginOutcome::failed;
    std::int64_t retry_after_seconds = 0; // set when locked
};

// Opens a session and clicks `entry` one digit at a time, reading each new
// layout from the reply.
LoginResult headless_login(LoginEndpoint& endpoint, std::string_view username, const KeyNumber& entry);

} // namespace gridauth
