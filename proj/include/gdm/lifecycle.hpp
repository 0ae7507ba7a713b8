#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gdm/aggregation.hpp"
#include "gdm/collaboration.hpp"
#include "gdm/event.hpp"
#include "gdm/notation.hpp"
#include "gdm/policy.hpp"

namespace gdm {

struct TransitionRule {
    LifecycleState from;
    std::string_view command;
    LifecycleState to;
};

std::span<const TransitionRule> transitionTable();
bool isLegalTransition(LifecycleState from, std::string_view command, LifecycleState to);
bool commandAllowedIn(LifecycleState state, std::string_view command);

/// Everything a command needs besides the collaboration itself. Commands emit
/// event drafts into `events`; the caller records them once the new state is
/// accepted.
struct CommandContext {
    std::string actorId;
    Timestamp at = 0;
    const PolicyRepository* policies = nullptr;
    const notation::RelationshipRegistry* relationships = nullptr;
    ThresholdMapping mapping;
    // closeRound runs the aggregation immediately when set
    bool autoAggregate = true;
    // replaces the adopted policy's round limit when set
    std::optional<int> maxRounds;
    std::vector<EventDraft> events;
};

struct ProposalDraft {
    ProposalKind kind = ProposalKind::Elementary;
    std::string title;
    std::string body;
    std::optional<std::string> refines;
    bool conflictual = false;
    std::vector<std::string> children;
    // body is correspondence notation; stored in canonical form
    bool notation = false;
};

struct DecisionDraft {
    std::string proposalId;
    AgreementKind kind = AgreementKind::Approval;
    std::optional<int> rating;
    std::optional<std::string> comment;
    std::optional<std::string> alternativeId;
    // created on the fly as an alternative refining `proposalId`
    std::optional<ProposalDraft> alternative;
};

struct ModeratorChoice {
    enum class Kind { AdjustThreshold, Reevaluate };
    Kind kind = Kind::Reevaluate;
    std::optional<Fraction> value;
};

struct ProposalEdit {
    enum class Op { Withdraw, Revise, AttachAlternative };
    Op op = Op::Withdraw;
    std::string proposalId;
    std::string body;  // Revise
    bool notation = false;
    ProposalDraft alternative;  // AttachAlternative
};

Collaboration createCollaboration(const std::string& collaborationId, const std::string& creatorId,
                                  std::vector<InvolvedUser> users, std::string intent, Timestamp at);

void defineSituation(Collaboration& c, CommandContext& ctx, std::string intent, std::optional<Timestamp> deadline);
void addUser(Collaboration& c, CommandContext& ctx, InvolvedUser user);
void removeUser(Collaboration& c, CommandContext& ctx, const std::string& userId);
void chooseMethod(Collaboration& c, CommandContext& ctx, const std::string& policyId,
                  std::optional<Fraction> thresholdOverride = std::nullopt,
                  std::optional<SelectionCriteria> criteria = std::nullopt);
void notifyActors(Collaboration& c, CommandContext& ctx);
std::string addProposal(Collaboration& c, CommandContext& ctx, const ProposalDraft& draft);
void addConflict(Collaboration& c, CommandContext& ctx, const std::string& p, const std::string& q);
void openEvaluation(Collaboration& c, CommandContext& ctx);
// Returns the id of the alternative created inline, if any.
std::optional<std::string> submitDecision(Collaboration& c, CommandContext& ctx, const DecisionDraft& draft);
void closeRound(Collaboration& c, CommandContext& ctx);
void runAggregation(Collaboration& c, CommandContext& ctx);
void moderatorChoice(Collaboration& c, CommandContext& ctx, const ModeratorChoice& choice);
std::vector<std::string> adjustProposals(Collaboration& c, CommandContext& ctx, std::span<const ProposalEdit> edits);

/// A serialized command as logged and as accepted over the wire.
struct Command {
    std::string collaborationId;
    std::string name;
    std::string actorId;
    nlohmann::json args = nlohmann::json::object();
    Timestamp at = 0;

    bool operator==(const Command&) const = default;
};

void to_json(nlohmann::json& j, const Command& c);
void from_json(const nlohmann::json& j, Command& c);

ProposalDraft proposalDraftFromJson(const nlohmann::json& j);
DecisionDraft decisionDraftFromJson(const nlohmann::json& j);

// Dispatches every command except createCollaboration. Returns a small result
// object (new state, created ids). Throws gdm::Error; `c` may be partially
// modified on error, so callers work on a copy.
nlohmann::json apply(Collaboration& c, CommandContext& ctx, const Command& cmd);

}  // namespace gdm
