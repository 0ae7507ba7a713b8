#include "gdm/collaboration.hpp"

#include <algorithm>
#include <cctype>

#include "gdm/error.hpp"

namespace gdm {

namespace {

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

const InvolvedUser* Collaboration::user(const std::string& id) const {
    for (const auto& u : involvedUsers)
        if (u.userId == id) return &u;
    return nullptr;
}

std::string Collaboration::moderatorId() const {
    for (const auto& u : involvedUsers)
        if (u.isModerator) return u.userId;
    return {};
}

std::size_t Collaboration::unresolvedCount() const {
    return static_cast<std::size_t>(std::count_if(proposals.all().begin(), proposals.all().end(), [](const auto& kv) {
        return kv.second.collectiveDecision == CollectiveStatus::Unresolved;
    }));
}

void validateDecision(const Decision& d, PreferenceKind prefKind, const Collaboration& collab) {
    if (!collab.proposals.contains(d.proposalId)) throw Error(ErrorCode::UnknownProposal, d.proposalId);
    if (!collab.user(d.decisionMakerId)) throw Error(ErrorCode::UnknownActor, d.decisionMakerId);

    if (d.binding) {
        if (!collab.isEligible(d.decisionMakerId))
            throw Error(ErrorCode::NotEligible, d.decisionMakerId + " is not an eligible decision maker");
    } else if (!collab.policy || !collab.policy->advisory) {
        throw Error(ErrorCode::NotEligible, "advice is only accepted under an advisory policy");
    }

    if (d.rating.has_value() != (prefKind == PreferenceKind::Rating))
        throw Error(ErrorCode::RatingModeMismatch,
                    prefKind == PreferenceKind::Rating ? "a rating in 1..5 is required" : "ratings are not used");
    if (d.rating && (*d.rating < 1 || *d.rating > 5))
        throw Error(ErrorCode::RatingModeMismatch, "rating must lie in 1..5");

    if (d.kind == AgreementKind::Reject && (!d.comment || blank(d.comment->text)))
        throw Error(ErrorCode::MissingComment, "a reject must carry a comment");

    if (d.kind == AgreementKind::Refinement) {
        if (!d.alternativeId) throw Error(ErrorCode::MissingAlternative, "a refinement must name an alternative");
        if (!collab.proposals.contains(*d.alternativeId))
            throw Error(ErrorCode::MissingAlternative, "unknown alternative " + *d.alternativeId);
        const auto& ap = collab.proposals.at(*d.alternativeId);
        if (ap.kind != ProposalKind::Alternative || ap.refines != d.proposalId)
            throw Error(ErrorCode::MissingAlternative, *d.alternativeId + " does not refine " + d.proposalId);
    }

    const auto& target = collab.proposals.at(d.proposalId);
    if (!target.isLeaf()) throw Error(ErrorCode::InvalidProposal, "composite proposals are decided through their leaves");
}

LoweredRound lowerRound(const Collaboration& collab, const ThresholdMapping& mapping, bool finalPass) {
    LoweredRound out;
    auto& in = out.input;
    const auto& policy = collab.policy.value();
    in.round = collab.currentRound;
    in.eligibleCount = collab.eligibleDMs.size();
    in.preferenceKind = policy.coDecision.preferenceKind;
    in.threshold = policy.coDecision.threshold;
    in.thresholdOverride = collab.thresholdOverride;
    in.mapping = mapping;
    in.iterationClass = policy.iterationClass;
    in.finalPass = finalPass;

    std::map<std::string, int> candidateIndex;
    for (const auto& [id, p] : collab.proposals.all()) {
        if (!p.isLeaf() || p.withdrawn || p.collectiveDecision != CollectiveStatus::Pending) continue;
        candidateIndex[id] = static_cast<int>(in.candidates.size());
        in.candidates.push_back({id, p.createdAt, {}, false});
    }
    for (auto& c : in.candidates) {
        for (const auto& other : collab.proposals.at(c.proposalId).conflictsWith) {
            if (auto it = candidateIndex.find(other); it != candidateIndex.end())
                c.conflicts.push_back(it->second);
            else if (collab.proposals.at(other).collectiveDecision == CollectiveStatus::Approved)
                c.blocked = true;
        }
    }

    std::map<std::string, int> voterIndex;
    for (const auto& id : collab.eligibleDMs) {
        voterIndex[id] = static_cast<int>(out.voterIds.size());
        out.voterIds.push_back(id);
        in.weights.push_back(collab.user(id)->expertiseLevel);
    }
    if (collab.finalDecisionMaker) in.finalDecisionMaker = voterIndex.at(*collab.finalDecisionMaker);

    std::map<std::pair<int, int>, std::size_t> latest;
    for (const auto& d : collab.decisions) {
        if (d.round != collab.currentRound || !d.binding) continue;
        auto c = candidateIndex.find(d.proposalId);
        auto v = voterIndex.find(d.decisionMakerId);
        if (c == candidateIndex.end() || v == voterIndex.end()) continue;
        Ballot b{v->second, c->second, d.kind, d.rating.value_or(0)};
        auto key = std::make_pair(v->second, c->second);
        if (auto it = latest.find(key); it != latest.end()) {
            in.ballots[it->second] = b;
        } else {
            latest.emplace(key, in.ballots.size());
            in.ballots.push_back(b);
        }
    }
    return out;
}

RoundResult aggregateRound(const Collaboration& collab, const ThresholdMapping& mapping, bool finalPass,
                           LoweredRound* lowered) {
    auto round = lowerRound(collab, mapping, finalPass);
    auto result = aggregate(round.input);
    if (lowered) *lowered = std::move(round);
    return result;
}

void to_json(nlohmann::json& j, const Transition& t) {
    j = {{"from", t.from}, {"to", t.to}, {"actorId", t.actorId}, {"command", t.command}, {"at", t.at}};
}

void from_json(const nlohmann::json& j, Transition& t) {
    t.from = j.at("from").get<LifecycleState>();
    t.to = j.at("to").get<LifecycleState>();
    t.actorId = j.at("actorId").get<std::string>();
    t.command = j.at("command").get<std::string>();
    t.at = j.at("at").get<Timestamp>();
}

void to_json(nlohmann::json& j, const CandidateOutcome& o) {
    j = {{"metThreshold", o.metThreshold},
         {"explicitlyRejected", o.explicitlyRejected},
         {"status", o.status},
         {"resolution", std::string(name(o.resolution))},
         {"conflictSet", o.conflictSet}};
    if (o.tally) j["tally"] = *o.tally;
}

void from_json(const nlohmann::json& j, CandidateOutcome& o) {
    o.metThreshold = j.at("metThreshold").get<bool>();
    o.explicitlyRejected = j.at("explicitlyRejected").get<bool>();
    o.status = j.at("status").get<CollectiveStatus>();
    o.resolution = parseResolution(j.at("resolution").get<std::string>());
    o.conflictSet = j.at("conflictSet").get<int>();
    if (j.contains("tally"))
        o.tally = j.at("tally").get<RoundTally>();
    else
        o.tally.reset();
}

void to_json(nlohmann::json& j, const Collaboration& c) {
    j = {{"collaborationId", c.collaborationId},
         {"intent", c.intent},
         {"createdAt", c.createdAt},
         {"involvedUsers", c.involvedUsers},
         {"adoptedPolicyId", c.adoptedPolicyId},
         {"eligibleDMs", c.eligibleDMs},
         {"proposals", c.proposals},
         {"currentRound", c.currentRound},
         {"state", c.state},
         {"decisions", c.decisions},
         {"outcomes", c.outcomes},
         {"reevaluated", c.reevaluated},
         {"nextOrdinal", c.nextOrdinal},
         {"history", c.history}};
    j["deadline"] = c.deadline ? nlohmann::json(*c.deadline) : nlohmann::json(nullptr);
    j["policy"] = c.policy ? nlohmann::json(*c.policy) : nlohmann::json(nullptr);
    j["finalDecisionMaker"] = c.finalDecisionMaker ? nlohmann::json(*c.finalDecisionMaker) : nlohmann::json(nullptr);
    j["thresholdOverride"] = c.thresholdOverride ? fractionToJson(*c.thresholdOverride) : nlohmann::json(nullptr);
    j["workProduct"] = c.workProduct ? nlohmann::json(*c.workProduct) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Collaboration& c) {
    c.collaborationId = j.at("collaborationId").get<std::string>();
    c.intent = j.at("intent").get<std::string>();
    c.createdAt = j.at("createdAt").get<Timestamp>();
    c.involvedUsers = j.at("involvedUsers").get<std::vector<InvolvedUser>>();
    c.adoptedPolicyId = j.at("adoptedPolicyId").get<std::string>();
    c.eligibleDMs = j.at("eligibleDMs").get<std::set<std::string>>();
    c.proposals = j.at("proposals").get<ProposalStore>();
    c.currentRound = j.at("currentRound").get<int>();
    c.state = j.at("state").get<LifecycleState>();
    c.decisions = j.at("decisions").get<std::vector<Decision>>();
    c.outcomes = j.at("outcomes").get<std::map<std::string, CandidateOutcome>>();
    c.reevaluated = j.at("reevaluated").get<bool>();
    c.nextOrdinal = j.at("nextOrdinal").get<std::uint64_t>();
    c.history = j.at("history").get<std::vector<Transition>>();
    auto opt = [&](const char* key) -> const nlohmann::json* {
        auto it = j.find(key);
        return it == j.end() || it->is_null() ? nullptr : &*it;
    };
    c.deadline = opt("deadline") ? std::optional<Timestamp>(opt("deadline")->get<Timestamp>()) : std::nullopt;
    c.policy = opt("policy") ? std::optional<DecisionPolicy>(opt("policy")->get<DecisionPolicy>()) : std::nullopt;
    c.finalDecisionMaker =
        opt("finalDecisionMaker") ? std::optional<std::string>(opt("finalDecisionMaker")->get<std::string>()) : std::nullopt;
    c.thresholdOverride =
        opt("thresholdOverride") ? std::optional<Fraction>(fractionFromJson(*opt("thresholdOverride"))) : std::nullopt;
    c.workProduct = opt("workProduct")
                        ? std::optional<CollaborativeWorkProduct>(opt("workProduct")->get<CollaborativeWorkProduct>())
                        : std::nullopt;
}

}  // namespace gdm
