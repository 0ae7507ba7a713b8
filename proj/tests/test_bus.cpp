#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "gdm/bus.hpp"
#include "gdm/error.hpp"
#include "support.hpp"

using namespace gdm;

namespace {

EventDraft draft(EventKind kind, std::vector<std::string> subjects = {}) {
    EventDraft d;
    d.kind = kind;
    d.subjects = std::move(subjects);
    return d;
}

}  // namespace

TEST_CASE("subscribing needs a declared subject") {
    NotificationBus bus;
    CHECK_THROWS_AS(bus.subscribe("u", "nowhere"), Error);
    bus.declareSubject("c1", "c1");
    auto s = bus.subscribe("u", "c1", 5);
    CHECK(s.subjectId == "c1");
    CHECK(bus.subscribe("u", "c1", 9) == s);
    CHECK(bus.subscriptions("u").size() == 1);
    bus.unsubscribe("u", "c1");
    CHECK(bus.subscriptions("u").empty());
}

TEST_CASE("events reach observers in seq order") {
    NotificationBus bus;
    bus.declareSubject("c1", "c1");
    bus.declareSubject("p1", "c1");
    std::vector<std::uint64_t> seen;
    bus.subscribe("u", "p1");
    bus.attach("u", [&](const Event& e) {
        seen.push_back(e.seq);
        return true;
    });
    bus.publish("c1", draft(EventKind::ProposalCreated, {"p1"}), 1);
    bus.publish("c1", draft(EventKind::RoundClosed), 2);  // u is not subscribed to c1
    bus.publish("c1", draft(EventKind::DecisionRecorded, {"p1"}), 3);
    CHECK(seen == std::vector<std::uint64_t>{1, 3});
    CHECK(bus.lastSeq("c1") == 3);
    CHECK(bus.events("c1", 2).size() == 2);
}

TEST_CASE("unattached observers collect a mailbox") {
    NotificationBus bus;
    bus.declareSubject("c1", "c1");
    bus.subscribe("u", "c1");
    EventDraft direct = draft(EventKind::ActorAssigned);
    direct.recipient = "v";
    bus.record("c1", {draft(EventKind::RoundClosed), direct}, 1);
    CHECK(bus.drainMailbox("u").empty());  // nothing delivered before deliverPending
    bus.deliverPending("c1");
    CHECK(bus.drainMailbox("u").size() == 2);
    auto v = bus.drainMailbox("v");
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == EventKind::ActorAssigned);
    CHECK(bus.drainMailbox("u").empty());
}

TEST_CASE("append hook sees events before observers") {
    NotificationBus bus;
    bus.declareSubject("c1", "c1");
    std::vector<std::string> order;
    bus.setAppendHook([&](const Event&) { order.push_back("log"); });
    bus.subscribe("u", "c1");
    bus.attach("u", [&](const Event&) {
        order.push_back("deliver");
        return true;
    });
    bus.publish("c1", draft(EventKind::RoundClosed), 1);
    CHECK(order == std::vector<std::string>{"log", "deliver"});
}

TEST_CASE("a sink failing three times is dropped with an audit entry") {
    NotificationBus bus;
    bus.declareSubject("c1", "c1");
    bus.subscribe("bad", "c1");
    bus.subscribe("good", "c1");
    int attempts = 0, good = 0;
    std::vector<nlohmann::json> audited;
    bus.setAuditHook([&](const nlohmann::json& j) { audited.push_back(j); });
    bus.attach("bad", [&](const Event&) {
        ++attempts;
        return false;
    });
    bus.attach("good", [&](const Event&) {
        ++good;
        return true;
    });
    bus.publish("c1", draft(EventKind::RoundClosed), 1);
    CHECK(attempts == NotificationBus::kMaxAttempts);
    CHECK(good == 1);
    CHECK(bus.subscriptions("bad").empty());
    CHECK(bus.auditTrail().size() == 1);
    CHECK(audited.size() == 1);
    bus.publish("c1", draft(EventKind::RoundClosed), 2);
    CHECK(attempts == NotificationBus::kMaxAttempts);
    CHECK(good == 2);
}

TEST_CASE("concurrent publishers keep per-collaboration order") {
    NotificationBus bus;
    bus.declareSubject("c1", "c1");
    bus.subscribe("u", "c1");
    std::vector<std::uint64_t> seen;
    std::mutex m;
    bus.attach("u", [&](const Event& e) {
        std::lock_guard lock(m);
        seen.push_back(e.seq);
        return true;
    });
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&] {
            for (int i = 0; i < 250; ++i) bus.publish("c1", draft(EventKind::DecisionRecorded), i);
        });
    for (auto& t : threads) t.join();
    REQUIRE(seen.size() == 1000);
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i + 1);
}

TEST_CASE("eligible decision makers are registered on pending proposals") {
    testing_support::Session s(testing_support::team(2));
    s.setup("MajorityDeciding");
    const auto p = s.propose("dm1", "x");
    NotificationBus bus;
    bus.declareSubject(s.c.collaborationId, s.c.collaborationId);
    bus.declareSubject(p, s.c.collaborationId);
    auto subs = autoRegisterEligible(bus, s.c, 7);
    CHECK(subs.size() == 3);
    CHECK(autoRegisterEligible(bus, s.c, 8).size() == 3);
    CHECK(bus.subscriptions("dm2").size() == 1);
    CHECK(bus.subscriptions("dm2")[0].subjectId == p);
}
