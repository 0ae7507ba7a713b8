#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/aggregation.hpp"
#include "gdm/model.hpp"
#include "gdm/policy.hpp"
#include "gdm/vocabulary.hpp"

namespace gdm {

struct Transition {
    LifecycleState from = LifecycleState::Draft;
    LifecycleState to = LifecycleState::Draft;
    std::string actorId;
    std::string command;
    Timestamp at = 0;

    bool operator==(const Transition&) const = default;
};

/// A decision session. Plain value: the lifecycle mutates a copy and the
/// engine swaps it in once the command has been accepted and logged.
struct Collaboration {
    std::string collaborationId;
    std::string intent;
    std::optional<Timestamp> deadline;
    Timestamp createdAt = 0;
    std::vector<InvolvedUser> involvedUsers;
    std::string adoptedPolicyId;
    std::optional<DecisionPolicy> policy;  // frozen copy of the adopted policy
    std::set<std::string> eligibleDMs;
    std::optional<std::string> finalDecisionMaker;  // advisory policies only
    ProposalStore proposals;
    int currentRound = 0;
    LifecycleState state = LifecycleState::Draft;
    std::optional<Fraction> thresholdOverride;
    std::optional<CollaborativeWorkProduct> workProduct;

    std::vector<Decision> decisions;  // every accepted submission, all rounds
    std::map<std::string, CandidateOutcome> outcomes;  // latest per tallied proposal
    bool reevaluated = false;
    std::uint64_t nextOrdinal = 1;
    std::vector<Transition> history;

    const InvolvedUser* user(const std::string& id) const;
    std::string moderatorId() const;
    bool isModerator(const std::string& id) const { return !id.empty() && moderatorId() == id; }
    bool isEligible(const std::string& id) const { return eligibleDMs.count(id) != 0; }
    std::size_t unresolvedCount() const;

    bool operator==(const Collaboration&) const = default;
};

// Checks the Decision invariants against the collaboration: eligibility (or
// advice rights), rating mode, mandatory comment on reject and a matching
// alternative on refinement. Throws the corresponding Error.
void validateDecision(const Decision& d, PreferenceKind prefKind, const Collaboration& collab);

/// A closed round lowered to the index-based model, with the id of each
/// candidate and voter.
struct LoweredRound {
    RoundInput input;
    std::vector<std::string> voterIds;
};

// Candidates are the pending, non-withdrawn leaves; ballots are the binding
// decisions of the current round, last submission per (voter, proposal).
LoweredRound lowerRound(const Collaboration& collab, const ThresholdMapping& mapping, bool finalPass);

// Pure: computes outcomes of the current round without touching the
// collaboration. Throws QuorumNotReached.
RoundResult aggregateRound(const Collaboration& collab, const ThresholdMapping& mapping, bool finalPass,
                           LoweredRound* lowered = nullptr);

void to_json(nlohmann::json& j, const Transition& t);
void from_json(const nlohmann::json& j, Transition& t);
void to_json(nlohmann::json& j, const CandidateOutcome& o);
void from_json(const nlohmann::json& j, CandidateOutcome& o);
void to_json(nlohmann::json& j, const Collaboration& c);
void from_json(const nlohmann::json& j, Collaboration& c);

}  // namespace gdm
