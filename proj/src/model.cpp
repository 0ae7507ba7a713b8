#include "gdm/model.hpp"

#include <algorithm>

#include "gdm/error.hpp"

namespace gdm {

namespace {

template <class T>
void putOptional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
void getOptional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
    if (auto it = j.find(key); it != j.end() && !it->is_null())
        v = it->get<T>();
    else
        v.reset();
}

}  // namespace

void ProposalStore::insert(Proposal proposal) {
    const auto& id = proposal.proposalId;
    if (id.empty()) throw Error(ErrorCode::InvalidProposal, "proposal id is empty");
    if (contains(id)) throw Error(ErrorCode::InvalidProposal, "duplicate proposal id " + id);
    if (proposal.conflictsWith.count(id)) throw Error(ErrorCode::SelfConflict, id);
    for (const auto& other : proposal.conflictsWith)
        if (!contains(other)) throw Error(ErrorCode::UnknownProposal, other);

    switch (proposal.kind) {
        case ProposalKind::Elementary:
            if (!proposal.children.empty())
                throw Error(ErrorCode::InvalidProposal, "elementary proposal cannot have children");
            if (proposal.refines)
                throw Error(ErrorCode::InvalidProposal, "only alternative proposals refine another");
            break;
        case ProposalKind::Alternative: {
            if (!proposal.children.empty())
                throw Error(ErrorCode::InvalidProposal, "alternative proposal cannot have children");
            if (!proposal.refines)
                throw Error(ErrorCode::InvalidProposal, "alternative proposal must name the proposal it refines");
            auto target = proposals_.find(*proposal.refines);
            if (target == proposals_.end()) throw Error(ErrorCode::UnknownProposal, *proposal.refines);
            if (!target->second.isLeaf())
                throw Error(ErrorCode::InvalidProposal, "an alternative refines an elementary proposal");
            if (proposal.conflictual) proposal.conflictsWith.insert(*proposal.refines);
            break;
        }
        case ProposalKind::Composite: {
            if (proposal.children.empty())
                throw Error(ErrorCode::InvalidProposal, "composite proposal needs at least one child");
            std::set<std::string> seen;
            for (const auto& child : proposal.children) {
                if (child == id) throw Error(ErrorCode::CycleDetected, id + " lists itself as a child");
                if (!contains(child)) throw Error(ErrorCode::UnknownProposal, child);
                if (!seen.insert(child).second || parent_.count(child))
                    throw Error(ErrorCode::CycleDetected, child + " already has a parent");
            }
            break;
        }
    }

    for (const auto& child : proposal.children) parent_[child] = id;
    for (const auto& other : proposal.conflictsWith) proposals_.at(other).conflictsWith.insert(id);
    proposals_.emplace(id, std::move(proposal));
}

void ProposalStore::addConflict(const std::string& p, const std::string& q) {
    if (p == q) throw Error(ErrorCode::SelfConflict, p);
    auto a = proposals_.find(p);
    auto b = proposals_.find(q);
    if (a == proposals_.end()) throw Error(ErrorCode::UnknownProposal, p);
    if (b == proposals_.end()) throw Error(ErrorCode::UnknownProposal, q);
    a->second.conflictsWith.insert(q);
    b->second.conflictsWith.insert(p);
}

bool ProposalStore::isAncestor(const std::string& candidate, const std::string& of) const {
    std::optional<std::string> cur = of;
    for (std::size_t steps = 0; cur; ++steps) {
        if (*cur == candidate) return true;
        if (steps > proposals_.size()) throw Error(ErrorCode::CycleDetected, "parent chain of " + of);
        cur = parentOf(*cur);
    }
    return false;
}

void ProposalStore::attachChild(const std::string& parent, const std::string& child) {
    auto p = proposals_.find(parent);
    if (p == proposals_.end()) throw Error(ErrorCode::UnknownProposal, parent);
    if (!contains(child)) throw Error(ErrorCode::UnknownProposal, child);
    if (p->second.kind != ProposalKind::Composite)
        throw Error(ErrorCode::InvalidProposal, parent + " is not a composite");
    if (parent_.count(child)) throw Error(ErrorCode::CycleDetected, child + " already has a parent");
    if (isAncestor(child, parent)) throw Error(ErrorCode::CycleDetected, child + " is an ancestor of " + parent);
    p->second.children.push_back(child);
    parent_[child] = parent;
}

std::vector<std::string> ProposalStore::leavesOf(const std::string& id) const {
    std::vector<std::string> out;
    std::vector<std::string> stack{id};
    std::set<std::string> visited;
    while (!stack.empty()) {
        auto cur = std::move(stack.back());
        stack.pop_back();
        if (!visited.insert(cur).second) throw Error(ErrorCode::CycleDetected, cur);
        const auto& p = at(cur);
        if (p.isLeaf()) {
            out.push_back(cur);
            continue;
        }
        for (auto it = p.children.rbegin(); it != p.children.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

CollectiveStatus combineLeafStatuses(std::span<const CollectiveStatus> leaves) {
    auto has = [&](CollectiveStatus s) { return std::find(leaves.begin(), leaves.end(), s) != leaves.end(); };
    if (has(CollectiveStatus::Rejected)) return CollectiveStatus::Rejected;
    if (has(CollectiveStatus::Unresolved)) return CollectiveStatus::Unresolved;
    if (!leaves.empty() && std::all_of(leaves.begin(), leaves.end(),
                                       [](CollectiveStatus s) { return s == CollectiveStatus::Approved; }))
        return CollectiveStatus::Approved;
    return CollectiveStatus::Pending;
}

CollectiveStatus ProposalStore::compositeStatus(const std::string& compositeId) const {
    std::vector<CollectiveStatus> statuses;
    for (const auto& leaf : leavesOf(compositeId)) statuses.push_back(at(leaf).collectiveDecision);
    return combineLeafStatuses(statuses);
}

const Proposal& ProposalStore::at(const std::string& id) const {
    auto it = proposals_.find(id);
    if (it == proposals_.end()) throw Error(ErrorCode::UnknownProposal, id);
    return it->second;
}

Proposal& ProposalStore::at(const std::string& id) {
    auto it = proposals_.find(id);
    if (it == proposals_.end()) throw Error(ErrorCode::UnknownProposal, id);
    return it->second;
}

std::optional<std::string> ProposalStore::parentOf(const std::string& id) const {
    if (auto it = parent_.find(id); it != parent_.end()) return it->second;
    return std::nullopt;
}

void validateMembership(std::span<const InvolvedUser> users) {
    std::set<std::string> ids;
    int moderators = 0;
    for (const auto& u : users) {
        if (u.userId.empty()) throw Error(ErrorCode::InvalidMembership, "user id is empty");
        if (!ids.insert(u.userId).second) throw Error(ErrorCode::InvalidMembership, "duplicate user " + u.userId);
        if (u.expertiseLevel <= 0)
            throw Error(ErrorCode::InvalidMembership, "expertiseLevel of " + u.userId + " must be positive");
        if (u.isModerator) ++moderators;
    }
    if (moderators != 1)
        throw Error(ErrorCode::InvalidMembership,
                    "exactly one moderator required, found " + std::to_string(moderators));
}

void to_json(nlohmann::json& j, const Comment& c) {
    j = {{"authorId", c.authorId}, {"text", c.text}, {"createdAt", c.createdAt}};
}

void from_json(const nlohmann::json& j, Comment& c) {
    c.authorId = j.value("authorId", std::string{});
    c.text = j.at("text").get<std::string>();
    c.createdAt = j.value("createdAt", Timestamp{0});
}

void to_json(nlohmann::json& j, const Decision& d) {
    j = {{"decisionMakerId", d.decisionMakerId},
         {"proposalId", d.proposalId},
         {"round", d.round},
         {"kind", d.kind},
         {"submittedAt", d.submittedAt},
         {"binding", d.binding}};
    putOptional(j, "rating", d.rating);
    putOptional(j, "comment", d.comment);
    putOptional(j, "alternativeId", d.alternativeId);
}

void from_json(const nlohmann::json& j, Decision& d) {
    d.decisionMakerId = j.at("decisionMakerId").get<std::string>();
    d.proposalId = j.at("proposalId").get<std::string>();
    d.round = j.at("round").get<int>();
    d.kind = j.at("kind").get<AgreementKind>();
    d.submittedAt = j.value("submittedAt", Timestamp{0});
    d.binding = j.value("binding", true);
    getOptional(j, "rating", d.rating);
    getOptional(j, "comment", d.comment);
    getOptional(j, "alternativeId", d.alternativeId);
}

void to_json(nlohmann::json& j, const InvolvedUser& u) {
    j = {{"userId", u.userId},
         {"displayName", u.displayName},
         {"isModerator", u.isModerator},
         {"expertiseLevel", fractionToJson(u.expertiseLevel)}};
    putOptional(j, "viewpoint", u.viewpoint);
}

void from_json(const nlohmann::json& j, InvolvedUser& u) {
    u.userId = j.at("userId").get<std::string>();
    u.displayName = j.value("displayName", u.userId);
    u.isModerator = j.value("isModerator", false);
    u.expertiseLevel = j.contains("expertiseLevel") ? fractionFromJson(j.at("expertiseLevel")) : Fraction{1};
    getOptional(j, "viewpoint", u.viewpoint);
}

void to_json(nlohmann::json& j, const Proposal& p) {
    j = {{"proposalId", p.proposalId},
         {"title", p.title},
         {"authorId", p.authorId},
         {"createdAt", p.createdAt},
         {"kind", p.kind},
         {"collectiveDecision", p.collectiveDecision},
         {"conflictsWith", p.conflictsWith}};
    if (p.isLeaf()) j["body"] = p.body;
    if (p.kind == ProposalKind::Alternative) {
        j["refines"] = p.refines.value_or("");
        j["conflictual"] = p.conflictual;
    }
    if (p.kind == ProposalKind::Composite) j["children"] = p.children;
    if (p.withdrawn) j["withdrawn"] = true;
}

void from_json(const nlohmann::json& j, Proposal& p) {
    p.proposalId = j.at("proposalId").get<std::string>();
    p.title = j.value("title", std::string{});
    p.authorId = j.value("authorId", std::string{});
    p.createdAt = j.value("createdAt", Timestamp{0});
    p.kind = j.at("kind").get<ProposalKind>();
    p.collectiveDecision = j.value("collectiveDecision", CollectiveStatus::Pending);
    p.conflictsWith = j.value("conflictsWith", std::set<std::string>{});
    p.body = j.value("body", std::string{});
    getOptional(j, "refines", p.refines);
    p.conflictual = j.value("conflictual", false);
    p.children = j.value("children", std::vector<std::string>{});
    p.withdrawn = j.value("withdrawn", false);
}

void to_json(nlohmann::json& j, const CollaborativeWorkProduct& w) {
    j = {{"collaborationId", w.collaborationId},
         {"approvedProposalIds", w.approvedProposalIds},
         {"closedAt", w.closedAt},
         {"finalRound", w.finalRound}};
}

void from_json(const nlohmann::json& j, CollaborativeWorkProduct& w) {
    w.collaborationId = j.at("collaborationId").get<std::string>();
    w.approvedProposalIds = j.at("approvedProposalIds").get<std::set<std::string>>();
    w.closedAt = j.at("closedAt").get<Timestamp>();
    w.finalRound = j.at("finalRound").get<int>();
}

void to_json(nlohmann::json& j, const ProposalStore& s) {
    j = nlohmann::json::array();
    for (const auto& [id, p] : s.all()) j.push_back(p);
}

ProposalStore ProposalStore::restore(std::vector<Proposal> proposals) {
    ProposalStore s;
    for (auto& p : proposals) {
        auto id = p.proposalId;
        if (!s.proposals_.emplace(id, std::move(p)).second)
            throw Error(ErrorCode::InvalidProposal, "duplicate proposal id " + id);
    }
    for (const auto& [id, p] : s.proposals_) {
        for (const auto& other : p.conflictsWith) {
            if (other == id) throw Error(ErrorCode::SelfConflict, id);
            auto it = s.proposals_.find(other);
            if (it == s.proposals_.end()) throw Error(ErrorCode::UnknownProposal, other);
            if (!it->second.conflictsWith.count(id))
                throw Error(ErrorCode::InvalidProposal, "asymmetric conflict " + id + "/" + other);
        }
        for (const auto& child : p.children) {
            if (!s.proposals_.count(child)) throw Error(ErrorCode::UnknownProposal, child);
            if (!s.parent_.emplace(child, id).second) throw Error(ErrorCode::CycleDetected, child);
        }
    }
    for (const auto& [id, p] : s.proposals_)
        if (s.isAncestor(id, s.parentOf(id).value_or(""))) throw Error(ErrorCode::CycleDetected, id);
    return s;
}

void from_json(const nlohmann::json& j, ProposalStore& s) {
    s = ProposalStore::restore(j.get<std::vector<Proposal>>());
}

}  // namespace gdm
