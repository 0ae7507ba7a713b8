#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "gdm/error.hpp"
#include "gdm/policy.hpp"
#include "support.hpp"

using namespace gdm;
using testing_support::member;

TEST_CASE("the five builtin policies are valid") {
    auto all = builtinPolicies();
    REQUIRE(all.size() == 5);
    std::vector<std::string> names;
    for (const auto& p : all) {
        CHECK(validatePolicy(p).empty());
        CHECK(p.policyId == p.name());
        names.push_back(p.name());
    }
    CHECK(names == std::vector<std::string>{"Delegating", "TakingAdvice", "MajorityDeciding", "ConsentingTogether",
                                            "NegotiatingTogether"});
}

TEST_CASE("builtin configurations") {
    PolicyRepository repo;
    auto consent = repo.get("ConsentingTogether");
    CHECK(consent.coDecision.threshold == AgreementThreshold::Strict);
    CHECK(consent.coDecision.processKind == DecisionProcessKind::Consensus2Vote);
    CHECK(consent.iterative());
    auto negotiate = repo.get("NegotiatingTogether");
    CHECK(negotiate.coDecision.threshold == AgreementThreshold::High);
    CHECK(negotiate.coDecision.processKind == DecisionProcessKind::Negotiation2Vote);
    auto majority = repo.get("MajorityDeciding");
    CHECK(majority.participation.type == ParticipationType::Democratic);
    CHECK(majority.coDecision.threshold == AgreementThreshold::Low);
    CHECK_FALSE(majority.iterative());
    CHECK(repo.get("TakingAdvice").advisory);
    CHECK(repo.get("Delegating").maxRounds == kDefaultMaxRounds);
}

TEST_CASE("manual entry of MajorityDeciding") {
    PolicyRepository repo;
    const auto text = renderManual(repo.get("MajorityDeciding"));
    CHECK(text.find("opinions of all the stakeholders") != std::string::npos);
    CHECK(repo.describe("MajorityDeciding").relatedPatterns.front() == "Delegating");
    CHECK(text.find("Delegating") != std::string::npos);
}

TEST_CASE("structural violations are listed, not thrown") {
    auto p = PolicyRepository().get("ConsentingTogether");
    p.coDecision.threshold = AgreementThreshold::High;
    CHECK_FALSE(validatePolicy(p).empty());

    auto n = PolicyRepository().get("NegotiatingTogether");
    n.coDecision.threshold = AgreementThreshold::Strict;
    CHECK_FALSE(validatePolicy(n).empty());

    auto r = PolicyRepository().get("Delegating");
    r.participation.criteria.reset();
    CHECK_FALSE(validatePolicy(r).empty());
}

TEST_CASE("threshold overrides must respect the policy") {
    PolicyRepository repo;
    CHECK_FALSE(validatePolicyChoice(repo.get("ConsentingTogether"), Fraction(4, 5)).empty());
    CHECK(validatePolicyChoice(repo.get("ConsentingTogether"), Fraction(1)).empty());
    CHECK_FALSE(validatePolicyChoice(repo.get("NegotiatingTogether"), Fraction(1)).empty());
    CHECK(validatePolicyChoice(repo.get("NegotiatingTogether"), Fraction(9, 10)).empty());
    CHECK_FALSE(validatePolicyChoice(repo.get("MajorityDeciding"), Fraction(0)).empty());
}

TEST_CASE("repository registration") {
    PolicyRepository repo;
    CHECK_THROWS_AS(repo.get("Nope"), Error);
    auto custom = repo.get("MajorityDeciding");
    CHECK_THROWS_AS(repo.add(custom), Error);
    custom.descriptor.name = "QuickPoll";
    custom.policyId.clear();
    repo.add(custom);
    CHECK(repo.names().back() == "QuickPoll");
    CHECK(repo.get("QuickPoll").policyId == "QuickPoll");

    auto bad = custom;
    bad.descriptor.name = "BadPoll";
    bad.policyId = "BadPoll";
    bad.maxRounds = 0;
    try {
        repo.add(bad);
        FAIL("expected InvalidPolicy");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidPolicy);
    }
}

TEST_CASE("concurrent lookups and registrations") {
    PolicyRepository repo;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                auto p = repo.get("MajorityDeciding");
                p.descriptor.name = "Poll" + std::to_string(t) + "_" + std::to_string(i);
                p.policyId = p.descriptor.name;
                repo.add(p);
                CHECK(repo.find("ConsentingTogether").has_value());
            }
        });
    for (auto& th : threads) th.join();
    CHECK(repo.names().size() == 5 + 200);
}

TEST_CASE("eligible decision makers") {
    std::vector<InvolvedUser> users{member("mod", true), member("a", false, 3), member("b", false, 1)};
    users[1].viewpoint = "BP";
    users[2].viewpoint = "SD";
    PolicyRepository repo;

    auto democratic = eligibleDecisionMakers(users, repo.get("MajorityDeciding"));
    CHECK(democratic == std::set<std::string>{"mod", "a", "b"});

    auto delegating = repo.get("Delegating");
    CHECK(eligibleDecisionMakers(users, delegating) == std::set<std::string>{"mod"});

    SelectionCriteria expert;
    expert.minExpertise = Fraction(2);
    delegating.participation.criteria = expert;
    CHECK(eligibleDecisionMakers(users, delegating) == std::set<std::string>{"a"});

    // relaxing the expertise bound never shrinks the set
    expert.minExpertise = Fraction(1);
    delegating.participation.criteria = expert;
    CHECK(eligibleDecisionMakers(users, delegating).size() == 3);

    SelectionCriteria viewpoint;
    viewpoint.allowedViewpoints = std::set<std::string>{"SD"};
    delegating.participation.criteria = viewpoint;
    CHECK(eligibleDecisionMakers(users, delegating) == std::set<std::string>{"b"});

    SelectionCriteria nobody;
    nobody.minExpertise = Fraction(10);
    delegating.participation.criteria = nobody;
    try {
        eligibleDecisionMakers(users, delegating);
        FAIL("expected NoEligibleActors");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoEligibleActors);
    }

    CHECK(finalDecisionMaker(users, repo.get("TakingAdvice")) == std::optional<std::string>("mod"));
    CHECK_FALSE(finalDecisionMaker(users, repo.get("MajorityDeciding")).has_value());
}

TEST_CASE("policy json round trip") {
    for (const auto& p : builtinPolicies()) {
        nlohmann::json j = p;
        CHECK(j.get<DecisionPolicy>() == p);
    }
}
