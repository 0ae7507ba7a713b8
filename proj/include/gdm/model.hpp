#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/fraction.hpp"
#include "gdm/vocabulary.hpp"

namespace gdm {

struct Comment {
    std::string authorId;
    std::string text;
    Timestamp createdAt = 0;

    bool operator==(const Comment&) const = default;
};

/// One actor's evaluation of one proposal in one round.
struct Decision {
    std::string decisionMakerId;
    std::string proposalId;
    int round = 1;
    AgreementKind kind = AgreementKind::Approval;
    std::optional<int> rating;
    std::optional<Comment> comment;
    std::optional<std::string> alternativeId;
    Timestamp submittedAt = 0;
    // false for advice under an advisory policy; advice never enters a tally
    bool binding = true;

    bool operator==(const Decision&) const = default;
};

struct InvolvedUser {
    std::string userId;
    std::string displayName;
    bool isModerator = false;
    Fraction expertiseLevel{1};
    std::optional<std::string> viewpoint;

    bool operator==(const InvolvedUser&) const = default;
};

/// Elementary, alternative and composite proposals share one record; the
/// kind decides which of the trailing fields are meaningful.
struct Proposal {
    std::string proposalId;
    std::string title;
    std::string authorId;
    Timestamp createdAt = 0;
    ProposalKind kind = ProposalKind::Elementary;
    CollectiveStatus collectiveDecision = CollectiveStatus::Pending;
    std::set<std::string> conflictsWith;

    // elementary and alternative
    std::string body;
    // alternative only
    std::optional<std::string> refines;
    bool conflictual = false;
    // composite only
    std::vector<std::string> children;

    // set by a withdrawal edit; withdrawn proposals are never tallied
    bool withdrawn = false;

    bool isLeaf() const { return kind != ProposalKind::Composite; }
    bool operator==(const Proposal&) const = default;
};

struct CollaborativeWorkProduct {
    std::string collaborationId;
    std::set<std::string> approvedProposalIds;
    Timestamp closedAt = 0;
    int finalRound = 0;

    bool operator==(const CollaborativeWorkProduct&) const = default;
};

/// Proposal set of one collaboration. Keeps the conflict relation symmetric
/// and the composite child graph a forest.
class ProposalStore {
public:
    // Validates kind-specific invariants and links; a conflictual alternative
    // gets its conflict with `refines` recorded on both sides.
    void insert(Proposal proposal);

    // Idempotent. Throws SelfConflict or UnknownProposal.
    void addConflict(const std::string& p, const std::string& q);

    // Appends `child` under composite `parent`. Throws CycleDetected when the
    // child already has a parent or is an ancestor of `parent`.
    void attachChild(const std::string& parent, const std::string& child);

    CollectiveStatus compositeStatus(const std::string& compositeId) const;

    // Leaf descendants of a composite in depth-first order; a leaf yields itself.
    std::vector<std::string> leavesOf(const std::string& id) const;

    bool contains(const std::string& id) const { return proposals_.count(id) != 0; }
    const Proposal& at(const std::string& id) const;
    Proposal& at(const std::string& id);
    std::optional<std::string> parentOf(const std::string& id) const;

    const std::map<std::string, Proposal>& all() const { return proposals_; }
    std::size_t size() const { return proposals_.size(); }

    // Rebuilds a store from serialized proposals, checking symmetry and the
    // forest shape instead of re-deriving links.
    static ProposalStore restore(std::vector<Proposal> proposals);

    bool operator==(const ProposalStore&) const = default;

private:
    bool isAncestor(const std::string& candidate, const std::string& of) const;

    std::map<std::string, Proposal> proposals_;
    std::map<std::string, std::string> parent_;
};

// Derived collective status of a composite from its leaves' statuses:
// any rejected -> rejected, else any unresolved -> unresolved, else all
// approved -> approved, else pending.
CollectiveStatus combineLeafStatuses(std::span<const CollectiveStatus> leaves);

// Enforces unique ids, positive expertise and exactly one moderator.
// Throws InvalidMembership.
void validateMembership(std::span<const InvolvedUser> users);

void to_json(nlohmann::json& j, const Comment& c);
void from_json(const nlohmann::json& j, Comment& c);
void to_json(nlohmann::json& j, const Decision& d);
void from_json(const nlohmann::json& j, Decision& d);
void to_json(nlohmann::json& j, const InvolvedUser& u);
void from_json(const nlohmann::json& j, InvolvedUser& u);
void to_json(nlohmann::json& j, const Proposal& p);
void from_json(const nlohmann::json& j, Proposal& p);
void to_json(nlohmann::json& j, const CollaborativeWorkProduct& w);
void from_json(const nlohmann::json& j, CollaborativeWorkProduct& w);
void to_json(nlohmann::json& j, const ProposalStore& s);
void from_json(const nlohmann::json& j, ProposalStore& s);

}  // namespace gdm
