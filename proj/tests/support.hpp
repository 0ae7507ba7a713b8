#pragma once

#include <string>
#include <vector>

#include "gdm/lifecycle.hpp"

namespace testing_support {

inline gdm::InvolvedUser member(const std::string& id, bool moderator = false, gdm::Fraction weight = 1) {
    gdm::InvolvedUser u;
    u.userId = id;
    u.displayName = id;
    u.isModerator = moderator;
    u.expertiseLevel = weight;
    return u;
}

// "mod" plus dm1..dmN
inline std::vector<gdm::InvolvedUser> team(int n) {
    std::vector<gdm::InvolvedUser> users{member("mod", true)};
    for (int i = 1; i <= n; ++i) users.push_back(member("dm" + std::to_string(i)));
    return users;
}

/// Drives one collaboration through the lifecycle functions directly,
/// committing only successful commands the way the engine does.
struct Session {
    gdm::PolicyRepository policies;
    gdm::notation::RelationshipRegistry relationships;
    gdm::Collaboration c;
    gdm::ThresholdMapping mapping;
    gdm::Timestamp clock = 1000;
    std::vector<gdm::EventDraft> events;

    explicit Session(std::vector<gdm::InvolvedUser> users, const std::string& id = "c1")
        : c(gdm::createCollaboration(id, "mod", std::move(users), "", clock)) {}

    nlohmann::json run(const std::string& actor, const std::string& name,
                       nlohmann::json args = nlohmann::json::object()) {
        clock += 1000;
        gdm::CommandContext ctx;
        ctx.actorId = actor;
        ctx.at = clock;
        ctx.policies = &policies;
        ctx.relationships = &relationships;
        ctx.mapping = mapping;
        auto next = c;
        auto result = gdm::apply(next, ctx, {c.collaborationId, name, actor, std::move(args), clock});
        c = std::move(next);
        events.insert(events.end(), ctx.events.begin(), ctx.events.end());
        return result;
    }

    // Draft -> Elaboration with the given policy.
    void setup(const std::string& policy, nlohmann::json extra = nlohmann::json::object()) {
        run("mod", "defineSituation", {{"intent", "test"}});
        extra["policyId"] = policy;
        run("mod", "chooseMethod", extra);
        run("mod", "notifyActors");
    }

    std::string propose(const std::string& actor, const std::string& body) {
        return run(actor, "addProposal", {{"body", body}})["proposalId"].get<std::string>();
    }

    void vote(const std::string& actor, const std::string& proposal, const std::string& kind) {
        nlohmann::json args = {{"proposalId", proposal}, {"kind", kind}};
        if (kind == "reject") args["comment"] = "no";
        run(actor, "submitDecision", args);
    }

    gdm::CollectiveStatus status(const std::string& id) const { return c.proposals.at(id).collectiveDecision; }

    std::size_t count(gdm::EventKind kind) const {
        std::size_t n = 0;
        for (const auto& e : events) n += e.kind == kind;
        return n;
    }
};

}  // namespace testing_support
