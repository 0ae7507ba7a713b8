#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "gdm/service.hpp"
#include "support.hpp"

using namespace gdm;

namespace {

struct Server {
    Engine engine;
    std::unique_ptr<Service> service;
    std::thread thread;
    int port = 0;

    Server() {
        ServiceConfig cfg;
        cfg.tokens = {{"t-mod", "mod"}, {"t1", "dm1"}, {"t2", "dm2"}, {"t3", "dm3"}};
        service = std::make_unique<Service>(engine, cfg);
        port = service->bindAnyPort();
        thread = std::thread([this] { service->listenAfterBind(); });
        while (!service->running()) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ~Server() {
        service->stop();
        thread.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(5, 0);
        return c;
    }
};

httplib::Headers auth(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

nlohmann::json post(Server& s, const std::string& token, const std::string& path, const nlohmann::json& body,
                    int expect, httplib::Headers extra = {}) {
    auto h = auth(token);
    h.insert(extra.begin(), extra.end());
    auto res = s.client().Post(path, h, body.dump(), "application/json");
    REQUIRE(res);
    INFO(path << " -> " << res->body);
    CHECK(res->status == expect);
    return nlohmann::json::parse(res->body);
}

std::string openRound(Server& s, std::string& proposal) {
    auto created = post(s, "t-mod", "/collaborations", {{"users", testing_support::team(3)}, {"intent", "api"}}, 201);
    const auto id = created["collaborationId"].get<std::string>();
    post(s, "t-mod", "/collaborations/" + id + "/situation", {{"intent", "api"}}, 200);
    post(s, "t-mod", "/collaborations/" + id + "/policy", {{"policyId", "MajorityDeciding"}}, 200);
    post(s, "t-mod", "/collaborations/" + id + "/notify", nlohmann::json::object(), 200);
    proposal = post(s, "t1", "/collaborations/" + id + "/proposals", {{"body", "Dependency[A:x -> B:y]"}, {"notation", true}},
                    201)["proposalId"];
    post(s, "t-mod", "/collaborations/" + id + "/rounds/open", nlohmann::json::object(), 200);
    return id;
}

}  // namespace

TEST_CASE("authentication is required for writes") {
    Server s;
    auto res = s.client().Post("/collaborations", "{}", "application/json");
    REQUIRE(res);
    CHECK(res->status == 401);
    res = s.client().Post("/collaborations", auth("wrong"), "{}", "application/json");
    REQUIRE(res);
    CHECK(res->status == 401);
    res = s.client().Get("/collaborations");
    REQUIRE(res);
    CHECK(res->status == 401);
}

TEST_CASE("policy catalogue is public") {
    Server s;
    auto res = s.client().Get("/policies");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body).size() == 5);
    res = s.client().Get("/policies/MajorityDeciding");
    REQUIRE(res);
    CHECK(nlohmann::json::parse(res->body)["manual"].get<std::string>().find("MajorityDeciding") != std::string::npos);
    res = s.client().Get("/policies/Nope");
    REQUIRE(res);
    CHECK(res->status == 404);
}

TEST_CASE("a round over HTTP") {
    Server s;
    std::string p;
    const auto id = openRound(s, p);
    auto err = post(s, "t2", "/proposals/" + p + "/decisions", {{"kind", "reject"}}, 422);
    CHECK(err["code"] == "MissingComment");
    post(s, "t2", "/collaborations/" + id + "/rounds/close", nlohmann::json::object(), 403);
    post(s, "t-mod", "/collaborations/" + id + "/rounds/close", nlohmann::json::object(), 409);
    for (auto t : {"t1", "t2", "t3"}) {
        auto r = post(s, t, "/proposals/" + p + "/decisions", {{"kind", "approval"}}, 201);
        CHECK(r["eventSeqs"].size() == 1);
    }
    auto closed = post(s, "t-mod", "/collaborations/" + id + "/rounds/close", nlohmann::json::object(), 200);
    CHECK(closed["state"] == "Closed");

    auto res = s.client().Get("/collaborations/" + id + "/summary", auth("t1"));
    REQUIRE(res);
    auto summary = nlohmann::json::parse(res->body);
    CHECK(summary["proposals"][0]["status"] == "approved");
    res = s.client().Get("/collaborations/" + id + "/summary?format=csv", auth("t1"));
    REQUIRE(res);
    CHECK(res->body.rfind("proposalId,", 0) == 0);
    res = s.client().Get("/collaborations/" + id + "/summary?format=xml", auth("t1"));
    REQUIRE(res);
    CHECK(res->status == 400);
    res = s.client().Get("/collaborations/nope", auth("t1"));
    REQUIRE(res);
    CHECK(res->status == 404);
}

TEST_CASE("idempotency keys replay the stored response") {
    Server s;
    std::string p;
    const auto id = openRound(s, p);
    const httplib::Headers key{{"Idempotency-Key", "k-1"}};
    auto first = post(s, "t1", "/proposals/" + p + "/decisions", {{"kind", "approval"}}, 201, key);
    auto res = s.client().Post("/proposals/" + p + "/decisions",
                               httplib::Headers{{"Authorization", "Bearer t1"}, {"Idempotency-Key", "k-1"}},
                               nlohmann::json{{"kind", "approval"}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    CHECK(res->get_header_value("Idempotent-Replay") == "true");
    CHECK(nlohmann::json::parse(res->body) == first);
    CHECK(s.engine.get(id).decisions.size() == 1);
}

TEST_CASE("event stream resumes from a sequence number") {
    Server s;
    std::string p;
    const auto id = openRound(s, p);
    const auto last = s.engine.bus().lastSeq(id);
    std::string received;
    std::thread reader([&] {
        auto c = s.client();
        auto h = auth("t1");
        h.insert({"Last-Event-ID", std::to_string(last - 1)});
        c.Get("/collaborations/" + id + "/events", h, [&](const char* data, std::size_t n) {
            received.append(data, n);
            return received.find("DecisionRecorded") == std::string::npos;
        });
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    post(s, "t1", "/proposals/" + p + "/decisions", {{"kind", "approval"}}, 201);
    reader.join();
    CHECK(received.find("id: " + std::to_string(last) + "\n") != std::string::npos);
    CHECK(received.find("id: " + std::to_string(last - 1) + "\n") == std::string::npos);
    CHECK(received.find("event: DecisionRecorded") != std::string::npos);
}

TEST_CASE("status mapping") {
    CHECK(httpStatus(ErrorCode::WrongState) == 409);
    CHECK(httpStatus(ErrorCode::NotEligible) == 403);
    CHECK(httpStatus(ErrorCode::UnknownProposal) == 404);
    CHECK(httpStatus(ErrorCode::InvalidThreshold) == 422);
    CHECK(httpStatus(ErrorCode::CorruptLog) == 500);
}
