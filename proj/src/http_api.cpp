#include "gridauth/http_api.hpp"

#include <httplib.h>

namespace gridauth {

using nlohmann::json;

json layout_to_json(const GridLayout& layout) {
    json header = json::array();
    for (ImageId id : layout.header) {
        header.push_back(id.value());
    }
    json cells = json::array();
    for (const auto& row : layout.cells) {
        json r = json::array();
        for (ImageId id : row) {
            r.push_back(id.value());
        }
        cells.push_back(std::move(r));
    }
    return json{{"header", std::move(header)}, {"cells", std::move(cells)}};
}

GridLayout layout_from_json(const json& j) {
    auto read_row = [](const json& row) {
        if (!row.is_array() || row.size() != kGridSize) {
            throw ValidationError("layout rows must hold 10 ints");
        }
        GridLayout::Row out{};
        for (std::size_t i = 0; i < kGridSize; ++i) {
            if (!row[i].is_number_integer()) {
                throw ValidationError("layout entries must be ints");
            }
            out[i] = ImageId(row[i].get<int>());
        }
        return out;
    };
    if (!j.is_object() || !j.contains("header") || !j.contains("cells")) {
        throw ValidationError("layout needs header and cells");
    }
    GridLayout layout;
    layout.header = read_row(j.at("header"));
    const json& cells = j.at("cells");
    if (!cells.is_array() || cells.size() != kGridSize) {
        throw ValidationError("layout needs 10 rows");
    }
    for (std::size_t r = 0; r < kGridSize; ++r) {
        layout.cells[r] = read_row(cells[r]);
    }
    if (const auto problem = check_layout(layout)) {
        throw ValidationError("invalid layout: " + *problem);
    }
    return layout;
}

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const std::string& message,
                std::optional<std::int64_t> retry_after = std::nullopt) {
    json body{{"error", message}};
    if (retry_after) {
        body["retry_after_seconds"] = *retry_after;
        res.set_header("Retry-After", std::to_string(*retry_after));
    }
    res.status = status;
    res.set_content(body.dump(), kJson);
}

// Parses the body as a JSON object or throws ApiError(400).
json parse_body(const httplib::Request& req) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw ApiError(400, "body must be a JSON object");
    }
    return body;
}

std::string username_field(const json& body) {
    const auto it = body.find("username");
    if (it == body.end() || !it->is_string()) {
        throw ApiError(400, "username must be a string");
    }
    return it->get<std::string>();
}

int int_field(const json& body, const char* name) {
    const auto it = body.find(name);
    if (it == body.end() || !it->is_number_integer()) {
        throw ApiError(400, std::string(name) + " must be an integer");
    }
    const auto v = it->get<std::int64_t>();
    if (v < -1'000'000 || v > 1'000'000) {
        throw ApiError(400, std::string(name) + " out of range");
    }
    return static_cast<int>(v);
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            handler(req, res);
        } catch (const ApiError& e) {
            send_error(res, e.status(), e.what(), e.retry_after_seconds());
        } catch (const std::exception&) {
            send_error(res, 500, "internal error");
        }
    };
}

} // namespace

void mount_routes(httplib::Server& server, AuthService& service) {
    server.Post("/api/v1/register", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const auto key = service.register_user(username_field(parse_body(req)));
                    res.status = 201;
                    res.set_content(json{{"key", key.to_string()}}.dump(), kJson);
                }));

    server.Post("/api/v1/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const auto created = service.create_session(username_field(parse_body(req)));
                    res.status = 201;
                    res.set_content(
                        json{{"session_id", created.session_id}, {"layout", layout_to_json(created.layout)}}.dump(),
                        kJson);
                }));

    server.Post(R"(/api/v1/sessions/([^/]+)/clicks)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    const json body = parse_body(req);
                    const auto reply =
                        service.click(req.matches[1].str(), int_field(body, "row"), int_field(body, "col"));
                    json out{{"entered", reply.entered}, {"status", to_string(reply.status)}};
                    out["layout"] = reply.layout ? layout_to_json(*reply.layout) : json(nullptr);
                    res.status = 200;
                    res.set_content(out.dump(), kJson);
                }));

    server.Get(R"(/api/v1/sessions/([^/]+))",
               guarded([&service](const httplib::Request& req, httplib::Response& res) {
                   const auto snap = service.get_session(req.matches[1].str());
                   res.status = 200;
                   res.set_content(json{{"status", to_string(snap.status)}, {"entered", snap.entered}}.dump(), kJson);
               }));
}

namespace {

json checked_json(const httplib::Result& result, int expected_status) {
    if (!result) {
        throw TransportError("request failed: " + httplib::to_string(result.error()));
    }
    json body = json::parse(result->body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw TransportError("response is not a JSON object (status " + std::to_string(result->status) + ")");
    }
    if (result->status != expected_status) {
        std::optional<std::int64_t> retry;
        if (const auto it = body.find("retry_after_seconds"); it != body.end() && it->is_number_integer()) {
            retry = it->get<std::int64_t>();
        }
        const auto msg = body.value("error", std::string("unexpected status"));
        throw ApiError(result->status, msg, retry);
    }
    return body;
}

} // namespace

HttpEndpoint::HttpEndpoint(const std::string& host, int port)
    : client_(std::make_unique<httplib::Client>(host, port)) {
    client_->set_connection_timeout(5);
    client_->set_read_timeout(10);
}

HttpEndpoint::~HttpEndpoint() = default;

KeyNumber HttpEndpoint::register_user(std::string_view username) {
    const json body = checked_json(
        client_->Post("/api/v1/register", json{{"username", std::string(username)}}.dump(), kJson), 201);
    try {
        return KeyNumber::parse(body.at("key").get<std::string>());
    } catch (const std::exception& e) {
        throw TransportError(std::string("malformed register response: ") + e.what());
    }
}

SessionOpenResult HttpEndpoint::open_session(std::string_view username) {
    try {
        const json body = checked_json(
            client_->Post("/api/v1/sessions", json{{"username", std::string(username)}}.dump(), kJson), 201);
        try {
            return OpenedSession{body.at("session_id").get<std::string>(), layout_from_json(body.at("layout"))};
        } catch (const std::exception& e) {
            throw TransportError(std::string("malformed session response: ") + e.what());
        }
    } catch (const ApiError& e) {
        if (e.status() == 423) {
            return LockedOut{e.retry_after_seconds().value_or(0)};
        }
        throw;
    }
}

ClickReply HttpEndpoint::click(std::string_view session_id, int row, int col) {
    const std::string path = "/api/v1/sessions/" + std::string(session_id) + "/clicks";
    const json body = checked_json(client_->Post(path, json{{"row", row}, {"col", col}}.dump(), kJson), 200);
    try {
        ClickReply reply;
        reply.entered = body.at("entered").get<int>();
        const auto status = parse_session_status(body.at("status").get<std::string>());
        if (!status) {
            throw TransportError("unknown session status");
        }
        reply.status = *status;
        if (const auto& l = body.at("layout"); !l.is_null()) {
            reply.layout = layout_from_json(l);
        }
        return reply;
    } catch (const TransportError&) {
        throw;
    } catch (const std::exception& e) {
        throw TransportError(std::string("malformed click response: ") + e.what());
    }
}

SessionSnapshot HttpEndpoint::get_session(std::string_view session_id) {
    const json body = checked_json(client_->Get("/api/v1/sessions/" + std::string(session_id)), 200);
    try {
        const auto status = parse_session_status(body.at("status").get<std::string>());
        if (!status) {
            throw TransportError("unknown session status");
        }
        return SessionSnapshot{*status, body.at("entered").get<int>()};
    } catch (const TransportError&) {
        throw;
    } catch (const std::exception& e) {
        throw TransportError(std::string("malformed session response: ") + e.what());
    }
}

} // namespace gridauth
