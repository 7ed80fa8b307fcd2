#include "gridauth/client.hpp"

namespace gridauth {

SessionOpenResult InProcessEndpoint::open_session(std::string_view username) {
    try {
        auto created = service_.create_session(username);
        return OpenedSession{std::move(created.session_id), created.layout};
    } catch (const ApiError& e) {
        if (e.status() == 423) {
            return LockedOut{e.retry_after_seconds().value_or(0)};
        }
        throw;
    }
}

ClickReply InProcessEndpoint::click(std::string_view session_id, int row, int col) {
    return service_.click(session_id, row, col);
}

std::optional<CellRef> first_cell_for_digit(const GridLayout& layout, std::uint8_t digit) {
    for (int r = 1; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) {
            if (resolve_click(layout, r, c).digit() == digit) {
                return CellRef{r, c};
            }
        }
    }
    return std::nullopt;
}

std::optional<CellRef> first_garbage_cell(const GridLayout& layout) {
    for (int r = 1; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) {
            if (resolve_click(layout, r, c).kind() == ClickResult::Kind::garbage) {
                return CellRef{r, c};
            }
        }
    }
    return std::nullopt;
}

LoginResult headless_login(LoginEndpoint& endpoint, std::string_view username, const KeyNumber& entry) {
    auto opened = endpoint.open_session(username);
    if (const auto* locked = std::get_if<LockedOut>(&opened)) {
        return LoginResult{LoginOutcome::locked, locked->retry_after_seconds};
    }
    auto& session = std::get<OpenedSession>(opened);
    GridLayout layout = session.layout;

    ClickReply reply;
    for (std::size_t i = 0; i < kKeyLength; ++i) {
        const auto cell = first_cell_for_digit(layout, entry.digit(i));
        if (!cell) {
            throw TransportError("layout offers no cell for a digit");
        }
        reply = endpoint.click(session.session_id, cell->row, cell->col);
        if (reply.status != SessionStatus::in_progress) {
            break;
        }
        if (!reply.layout) {
            throw TransportError("in-progress reply without a layout");
        }
        layout = *reply.layout;
    }
    switch (reply.status) {
    case SessionStatus::succeeded: return LoginResult{LoginOutcome::succeeded};
    case SessionStatus::failed: return LoginResult{LoginOutcome::failed};
    default: throw TransportError("session ended in unexpected state " + std::string(to_string(reply.status)));
    }
}

} // namespace gridauth
