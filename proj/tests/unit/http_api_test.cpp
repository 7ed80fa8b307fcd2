#include "gridauth/entropy.hpp"
#include "gridauth/http_api.hpp"

#include "http_server_fixture.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace gridauth;
using namespace gridauth::testing;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

struct Fixture {
    MockClock clock{epoch_2026()};
    SeededEntropy entropy{99};
    AccountsStore store{store_key(), {}};
    AuthService service{store, clock, entropy};
    LoopbackServer server{service};
    httplib::Client raw{"127.0.0.1", server.port()};

    httplib::Result post(const std::string& path, const json& body) {
        return raw.Post(path, body.dump(), "application/json");
    }
};

json body_of(const httplib::Result& r) { return json::parse(r->body); }

} // namespace

TEST_CASE("layout wire form") {
    SeededEntropy e(1);
    const auto layout = generate_layout(e);
    const json j = layout_to_json(layout);
    CHECK(j["header"].size() == 10);
    CHECK(j["cells"].size() == 10);
    CHECK(j["cells"][0] == j["header"]);
    CHECK(layout_from_json(j) == layout);

    json broken = j;
    broken["cells"][3][3] = 99;
    CHECK_THROWS_AS(layout_from_json(broken), ValidationError);
    broken = j;
    broken["cells"][3][3] = j["header"][0];
    broken["cells"][3][4] = j["header"][0];
    CHECK_THROWS_AS(layout_from_json(broken), ValidationError);
    CHECK_THROWS_AS(layout_from_json(json::object()), ValidationError);
}

TEST_CASE("register endpoint") {
    Fixture f;
    auto r = f.post("/api/v1/register", {{"username", "alice1"}});
    REQUIRE(r);
    CHECK(r->status == 201);
    const auto key = body_of(r)["key"].get<std::string>();
    CHECK(key.size() == 4);
    CHECK_NOTHROW(KeyNumber::parse(key));

    r = f.post("/api/v1/register", {{"username", "alice1"}});
    CHECK(r->status == 409);
    CHECK(body_of(r)["error"].is_string());

    r = f.post("/api/v1/register", {{"username", "a b"}});
    CHECK(r->status == 400);
    r = f.post("/api/v1/register", {{"name", "alice2"}});
    CHECK(r->status == 400);
    r = f.raw.Post("/api/v1/register", "{not json", "application/json");
    CHECK(r->status == 400);
}

TEST_CASE("login over HTTP") {
    Fixture f;
    HttpEndpoint client("127.0.0.1", f.server.port());
    const auto key = client.register_user("alice1");

    SUBCASE("session response shape") {
        auto r = f.post("/api/v1/sessions", {{"username", "alice1"}});
        CHECK(r->status == 201);
        const auto b = body_of(r);
        CHECK(b["session_id"].is_string());
        CHECK(b["layout"]["header"].size() == 10);
        CHECK(b["layout"]["cells"].size() == 10);
        for (const auto& row : b["layout"]["cells"]) CHECK(row.size() == 10);
    }
    SUBCASE("raw key") {
        CHECK(headless_login(client, "alice1", key).outcome == LoginOutcome::succeeded);
    }
    SUBCASE("SSR key") {
        CHECK(headless_login(client, "alice1", encode_ssr(key, f.service.current_day())).outcome ==
              LoginOutcome::succeeded);
    }
    SUBCASE("click responses") {
        const auto opened = std::get<OpenedSession>(client.open_session("alice1"));
        const auto cell = first_cell_for_digit(opened.layout, key.digit(0));
        auto r = f.post("/api/v1/sessions/" + opened.session_id + "/clicks", {{"row", cell->row}, {"col", cell->col}});
        CHECK(r->status == 200);
        auto b = body_of(r);
        CHECK(b["entered"] == 1);
        CHECK(b["status"] == "in_progress");
        CHECK(b["layout"].is_object());

        r = f.post("/api/v1/sessions/" + opened.session_id + "/clicks", {{"row", 0}, {"col", 2}});
        CHECK(r->status == 400);
        r = f.post("/api/v1/sessions/" + opened.session_id + "/clicks", {{"row", 12}, {"col", 2}});
        CHECK(r->status == 400);
        r = f.post("/api/v1/sessions/" + opened.session_id + "/clicks", {{"row", "1"}, {"col", 2}});
        CHECK(r->status == 400);

        r = f.raw.Get("/api/v1/sessions/" + opened.session_id);
        CHECK(r->status == 200);
        b = body_of(r);
        CHECK(b == json{{"status", "in_progress"}, {"entered", 1}});

        r = f.raw.Get("/api/v1/sessions/unknown");
        CHECK(r->status == 404);
        CHECK(body_of(r)["error"].is_string());
        r = f.post("/api/v1/sessions/unknown/clicks", {{"row", 1}, {"col", 1}});
        CHECK(r->status == 404);

        f.clock.advance(121s);
        r = f.post("/api/v1/sessions/" + opened.session_id + "/clicks", {{"row", 1}, {"col", 1}});
        CHECK(r->status == 410);
        CHECK(body_of(f.raw.Get("/api/v1/sessions/" + opened.session_id))["status"] == "expired");
    }
    SUBCASE("final click omits the layout") {
        const auto opened = std::get<OpenedSession>(client.open_session("alice1"));
        GridLayout layout = opened.layout;
        json last;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto cell = first_cell_for_digit(layout, key.digit(i));
            last = body_of(f.post("/api/v1/sessions/" + opened.session_id + "/clicks",
                                  {{"row", cell->row}, {"col", cell->col}}));
            if (!last["layout"].is_null()) layout = layout_from_json(last["layout"]);
        }
        CHECK(last["status"] == "succeeded");
        CHECK(last["entered"] == 4);
        CHECK(last["layout"].is_null());
        auto r = f.post("/api/v1/sessions/" + opened.session_id + "/clicks", {{"row", 1}, {"col", 1}});
        CHECK(r->status == 409);
    }
}

TEST_CASE("lockout over HTTP") {
    Fixture f;
    HttpEndpoint client("127.0.0.1", f.server.port());
    const auto key = client.register_user("bob22");
    const auto wrong = KeyNumber::from_value((key.value() + 5000) % 10000);
    for (int i = 0; i < 5; ++i) {
        CHECK(headless_login(client, "bob22", wrong).outcome == LoginOutcome::failed);
    }
    auto r = f.post("/api/v1/sessions", {{"username", "bob22"}});
    CHECK(r->status == 423);
    const auto b = body_of(r);
    CHECK(b["error"].is_string());
    CHECK(b["retry_after_seconds"].get<int>() <= 1800);
    CHECK(b["retry_after_seconds"].get<int>() > 0);

    const auto locked = headless_login(client, "bob22", key);
    CHECK(locked.outcome == LoginOutcome::locked);

    f.clock.advance(30min);
    CHECK(headless_login(client, "bob22", key).outcome == LoginOutcome::succeeded);
}

TEST_CASE("decoy and wrong-key responses share status codes and shape") {
    Fixture f;
    HttpEndpoint client("127.0.0.1", f.server.port());
    const auto key = client.register_user("carol9");
    const auto wrong = KeyNumber::from_value((key.value() + 1) % 10000);

    auto trace = [&](const std::string& user, const KeyNumber& entry) {
        std::vector<std::pair<int, std::vector<std::string>>> out;
        auto r = f.post("/api/v1/sessions", {{"username", user}});
        auto b = body_of(r);
        std::vector<std::string> keys;
        for (auto& [k, v] : b.items()) keys.push_back(k);
        out.emplace_back(r->status, keys);
        const std::string id = b["session_id"];
        GridLayout layout = layout_from_json(b["layout"]);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto cell = first_cell_for_digit(layout, entry.digit(i));
            r = f.post("/api/v1/sessions/" + id + "/clicks", {{"row", cell->row}, {"col", cell->col}});
            b = body_of(r);
            keys.clear();
            for (auto& [k, v] : b.items()) keys.push_back(k + ":" + std::string(v.type_name()));
            keys.push_back(b["status"].get<std::string>());
            out.emplace_back(r->status, keys);
            if (!b["layout"].is_null()) layout = layout_from_json(b["layout"]);
        }
        return out;
    };
    CHECK(trace("carol9", wrong) == trace("nobody7", key));
}

TEST_CASE("transport errors") {
    HttpEndpoint client("127.0.0.1", 1);
    CHECK_THROWS_AS(client.open_session("alice1"), TransportError);
}
