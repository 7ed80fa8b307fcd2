#pragma once

#include "gridauth/auth_service.hpp"
#include "gridauth/client.hpp"
#include "gridauth/grid.hpp"

#include <json.hpp>

#include <memory>
#include <string>

namespace httplib {
class Server;
class Client;
} // namespace httplib

namespace gridauth {

// Wire form: {"header": [10 ints], "cells": [[10 ints] x 10]} (row-major).
nlohmann::json layout_to_json(const GridLayout& layout);
// Throws ValidationError on shape errors or broken composition.
GridLayout layout_from_json(const nlohmann::json& j);

// Installs the v1 JSON routes:
//
//   POST /api/v1/register              {"username"}        -> 201 {"key"}
//   POST /api/v1/sessions              {"username"}        -> 201 {"session_id","layout"}
//   POST /api/v1/sessions/{id}/clicks  {"row","col"}       -> 200 {"entered","status","layout"|null}
//   GET  /api/v1/sessions/{id}                             -> 200 {"status","entered"}
//
// Errors: {"error": msg, "retry_after_seconds"?: n} with 400/404/409/410/423/500.
void mount_routes(httplib::Server& server, AuthService& service);

// LoginEndpoint over HTTP. Network and protocol failures throw
// TransportError; error statuses other than 423 throw ApiError.
class HttpEndpoint final : public LoginEndpoint {
public:
    HttpEndpoint(const std::string& host, int port);
    ~HttpEndpoint() override;

    SessionOpenResult open_session(std::string_view username) override;
    ClickReply click(std::string_view session_id, int row, int col) override;

    // POST /api/v1/register; returns the issued key.
    KeyNumber register_user(std::string_view username);
    SessionSnapshot get_session(std::string_view session_id);

private:
    std::unique_ptr<httplib::Client> client_;
};

} // namespace gridauth
