#include "gdm/lifecycle.hpp"

#include <algorithm>
#include <array>

#include "gdm/error.hpp"
#include "gdm/ids.hpp"

namespace gdm {

namespace {

using S = LifecycleState;

constexpr auto kTable = std::to_array<TransitionRule>({
    {S::Draft, "addUser", S::Draft},
    {S::Draft, "removeUser", S::Draft},
    {S::Configured, "addUser", S::Configured},
    {S::Configured, "removeUser", S::Configured},
    {S::Draft, "defineSituation", S::Configured},
    {S::Configured, "chooseMethod", S::MethodChosen},
    {S::MethodChosen, "notifyActors", S::Notified},
    {S::Notified, "advance", S::Elaboration},
    {S::Elaboration, "addProposal", S::Elaboration},
    {S::Elaboration, "addConflict", S::Elaboration},
    {S::Elaboration, "openEvaluation", S::EvaluationOpen},
    {S::EvaluationOpen, "addProposal", S::EvaluationOpen},
    {S::EvaluationOpen, "addConflict", S::EvaluationOpen},
    {S::EvaluationOpen, "submitDecision", S::EvaluationOpen},
    {S::EvaluationOpen, "closeRound", S::EvaluationClosed},
    {S::EvaluationClosed, "runAggregation", S::Aggregated},
    {S::Aggregated, "route", S::Closed},
    {S::Aggregated, "route", S::AdjustingProposals},
    {S::Aggregated, "route", S::AwaitingModeratorChoice},
    {S::AwaitingModeratorChoice, "moderatorChoice", S::Aggregated},
    {S::AwaitingModeratorChoice, "moderatorChoice", S::EvaluationOpen},
    {S::AdjustingProposals, "addProposal", S::AdjustingProposals},
    {S::AdjustingProposals, "addConflict", S::AdjustingProposals},
    {S::AdjustingProposals, "adjustProposals", S::EvaluationOpen},
});

void require(const Collaboration& c, std::string_view command) {
    if (!commandAllowedIn(c.state, command))
        throw Error(ErrorCode::WrongState,
                    std::string(command) + " is not allowed in state " + std::string(name(c.state)));
}

void requireModerator(const Collaboration& c, const CommandContext& ctx) {
    if (!c.isModerator(ctx.actorId)) throw Error(ErrorCode::NotModerator, ctx.actorId + " is not the moderator");
}

void requireParticipant(const Collaboration& c, const CommandContext& ctx) {
    if (!c.isModerator(ctx.actorId) && !c.isEligible(ctx.actorId))
        throw Error(ErrorCode::NotEligible, ctx.actorId + " is neither the moderator nor a decision maker");
}

void move(Collaboration& c, const CommandContext& ctx, std::string_view command, LifecycleState to) {
    if (!isLegalTransition(c.state, command, to))
        throw Error(ErrorCode::WrongState, "no transition " + std::string(name(c.state)) + " --" +
                                               std::string(command) + "--> " + std::string(name(to)));
    if (c.state != to) c.history.push_back({c.state, to, ctx.actorId, std::string(command), ctx.at});
    c.state = to;
}

void emit(CommandContext& ctx, EventKind kind, nlohmann::json payload, std::vector<std::string> subjects = {},
          std::optional<std::string> recipient = std::nullopt) {
    ctx.events.push_back({kind, std::move(payload), std::move(subjects), std::move(recipient)});
}

std::vector<std::string> openCandidates(const Collaboration& c) {
    std::vector<std::string> ids;
    for (const auto& [id, p] : c.proposals.all())
        if (p.isLeaf() && !p.withdrawn && p.collectiveDecision == CollectiveStatus::Pending) ids.push_back(id);
    return ids;
}

// Everyone whose input is requested in an evaluation round.
std::vector<std::string> evaluators(const Collaboration& c) {
    std::set<std::string> ids(c.eligibleDMs.begin(), c.eligibleDMs.end());
    if (c.policy && c.policy->advisory)
        for (const auto& u : c.involvedUsers) ids.insert(u.userId);
    return {ids.begin(), ids.end()};
}

void requestEvaluation(const Collaboration& c, CommandContext& ctx) {
    auto candidates = openCandidates(c);
    for (const auto& id : evaluators(c)) {
        emit(ctx, EventKind::EvaluationRequested,
             {{"userId", id},
              {"round", c.currentRound},
              {"binding", c.isEligible(id)},
              {"proposalIds", candidates}},
             candidates, id);
    }
}

void startRound(Collaboration& c, CommandContext& ctx, std::string_view command) {
    move(c, ctx, command, S::EvaluationOpen);
    ++c.currentRound;
    requestEvaluation(c, ctx);
}

std::string nextId(Collaboration& c, Timestamp at) {
    return makeSortableId(at, c.collaborationId, c.nextOrdinal++);
}

std::string insertProposal(Collaboration& c, CommandContext& ctx, const ProposalDraft& d) {
    Proposal p;
    p.title = d.title;
    p.authorId = ctx.actorId;
    p.createdAt = ctx.at;
    p.kind = d.kind;
    p.body = d.body;
    p.refines = d.refines;
    p.conflictual = d.conflictual;
    p.children = d.children;
    if (d.notation) {
        if (!ctx.relationships) throw Error(ErrorCode::BadRequest, "no relationship registry available");
        p.body = notation::canonicalize(d.body, *ctx.relationships);
    }
    if (p.kind == ProposalKind::Composite && !p.body.empty())
        throw Error(ErrorCode::InvalidProposal, "composite proposals carry no body");
    if (p.kind != ProposalKind::Composite && p.body.empty())
        throw Error(ErrorCode::InvalidProposal, "proposal body is empty");
    if (p.kind == ProposalKind::Alternative && p.refines && c.proposals.contains(*p.refines)) {
        const auto& target = c.proposals.at(*p.refines);
        if (target.collectiveDecision != CollectiveStatus::Pending || target.withdrawn)
            throw Error(ErrorCode::InvalidProposal, *p.refines + " is no longer open");
    }
    if (p.kind == ProposalKind::Composite)
        for (const auto& child : p.children)
            if (c.proposals.contains(child) && c.proposals.at(child).collectiveDecision != CollectiveStatus::Pending)
                throw Error(ErrorCode::InvalidProposal, child + " is already decided");

    p.proposalId = nextId(c, ctx.at);
    const auto id = p.proposalId;
    c.proposals.insert(p);

    const auto& stored = c.proposals.at(id);
    nlohmann::json payload = {{"proposalId", id},
                              {"kind", stored.kind},
                              {"authorId", stored.authorId},
                              {"title", stored.title},
                              {"body", stored.body}};
    if (stored.kind == ProposalKind::Alternative) {
        payload["refines"] = *stored.refines;
        payload["conflictual"] = stored.conflictual;
        emit(ctx, EventKind::AlternativeProposed, payload, {id, *stored.refines});
    } else {
        if (stored.kind == ProposalKind::Composite) payload["children"] = stored.children;
        emit(ctx, EventKind::ProposalCreated, payload, {id});
    }
    return id;
}

void liftComposites(Collaboration& c) {
    // children are inserted before their parents, so ids are not a safe order;
    // iterate until nothing changes (depth of the forest bounds the passes)
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [id, p] : c.proposals.all()) {
            if (p.isLeaf()) continue;
            auto s = c.proposals.compositeStatus(id);
            if (s != p.collectiveDecision) {
                c.proposals.at(id).collectiveDecision = s;
                changed = true;
            }
        }
    }
}

void close(Collaboration& c, CommandContext& ctx) {
    move(c, ctx, "route", S::Closed);
    CollaborativeWorkProduct wp;
    wp.collaborationId = c.collaborationId;
    wp.closedAt = ctx.at;
    wp.finalRound = c.currentRound;
    for (const auto& [id, p] : c.proposals.all())
        if (p.collectiveDecision == CollectiveStatus::Approved) wp.approvedProposalIds.insert(id);
    c.workProduct = wp;
    emit(ctx, EventKind::CollaborationClosed,
         {{"round", c.currentRound},
          {"approvedProposalIds", wp.approvedProposalIds},
          {"unresolvedCount", c.unresolvedCount()}});
}

void aggregateAndRoute(Collaboration& c, CommandContext& ctx, bool finalPass) {
    const auto& policy = c.policy.value();
    LoweredRound lowered;
    auto result = aggregateRound(c, ctx.mapping, finalPass, &lowered);

    nlohmann::json published = nlohmann::json::array();
    std::vector<std::string> subjects;
    std::vector<std::string> pending;
    for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
        const auto& id = lowered.input.candidates[i].proposalId;
        const auto& o = result.outcomes[i];
        c.proposals.at(id).collectiveDecision = o.status;
        c.outcomes[id] = o;
        subjects.push_back(id);
        if (o.status == CollectiveStatus::Pending) pending.push_back(id);
        nlohmann::json entry = o;
        entry["proposalId"] = id;
        published.push_back(std::move(entry));
    }
    liftComposites(c);
    emit(ctx, EventKind::CollectiveDecisionPublished,
         {{"round", c.currentRound}, {"converged", result.converged}, {"outcomes", published}}, subjects);

    if (result.converged || finalPass) {
        close(c, ctx);
        return;
    }
    if (policy.iterative()) {
        move(c, ctx, "route", S::AdjustingProposals);
        emit(ctx, EventKind::ThresholdMissed,
             {{"round", c.currentRound}, {"pendingProposalIds", pending}, {"next", name(c.state)}}, pending);
    } else {
        move(c, ctx, "route", S::AwaitingModeratorChoice);
        emit(ctx, EventKind::ThresholdMissed,
             {{"round", c.currentRound},
              {"pendingProposalIds", pending},
              {"next", name(c.state)},
              {"reevaluationAvailable", !c.reevaluated}},
             pending);
    }
}

bool needsRoute(const Collaboration& c) { return c.state == S::Aggregated; }

template <class T>
std::optional<T> optionalArg(const nlohmann::json& args, const char* key) {
    if (auto it = args.find(key); it != args.end() && !it->is_null()) return it->get<T>();
    return std::nullopt;
}

std::string requiredString(const nlohmann::json& args, const char* key) {
    auto it = args.find(key);
    if (it == args.end() || !it->is_string()) throw Error(ErrorCode::BadRequest, std::string("missing string '") + key + "'");
    return it->get<std::string>();
}

}  // namespace

std::span<const TransitionRule> transitionTable() { return kTable; }

bool isLegalTransition(LifecycleState from, std::string_view command, LifecycleState to) {
    return std::any_of(kTable.begin(), kTable.end(),
                       [&](const auto& r) { return r.from == from && r.command == command && r.to == to; });
}

bool commandAllowedIn(LifecycleState state, std::string_view command) {
    return std::any_of(kTable.begin(), kTable.end(),
                       [&](const auto& r) { return r.from == state && r.command == command; });
}

Collaboration createCollaboration(const std::string& collaborationId, const std::string& creatorId,
                                  std::vector<InvolvedUser> users, std::string intent, Timestamp at) {
    if (collaborationId.empty()) throw Error(ErrorCode::BadRequest, "collaboration id is empty");
    validateMembership(users);
    Collaboration c;
    c.collaborationId = collaborationId;
    c.involvedUsers = std::move(users);
    c.intent = std::move(intent);
    c.createdAt = at;
    if (!c.isModerator(creatorId)) throw Error(ErrorCode::NotModerator, creatorId + " must be the listed moderator");
    return c;
}

void defineSituation(Collaboration& c, CommandContext& ctx, std::string intent, std::optional<Timestamp> deadline) {
    require(c, "defineSituation");
    requireModerator(c, ctx);
    if (intent.empty() && c.intent.empty()) throw Error(ErrorCode::BadRequest, "intent is empty");
    if (!intent.empty()) c.intent = std::move(intent);
    c.deadline = deadline;
    move(c, ctx, "defineSituation", S::Configured);
}

void addUser(Collaboration& c, CommandContext& ctx, InvolvedUser user) {
    require(c, "addUser");
    requireModerator(c, ctx);
    auto users = c.involvedUsers;
    users.push_back(std::move(user));
    validateMembership(users);
    c.involvedUsers = std::move(users);
}

void removeUser(Collaboration& c, CommandContext& ctx, const std::string& userId) {
    require(c, "removeUser");
    requireModerator(c, ctx);
    auto users = c.involvedUsers;
    auto it = std::find_if(users.begin(), users.end(), [&](const auto& u) { return u.userId == userId; });
    if (it == users.end()) throw Error(ErrorCode::UnknownActor, userId);
    users.erase(it);
    validateMembership(users);
    c.involvedUsers = std::move(users);
}

void chooseMethod(Collaboration& c, CommandContext& ctx, const std::string& policyId,
                  std::optional<Fraction> thresholdOverride, std::optional<SelectionCriteria> criteria) {
    require(c, "chooseMethod");
    requireModerator(c, ctx);
    if (!ctx.policies) throw Error(ErrorCode::BadRequest, "no policy repository available");
    auto policy = ctx.policies->find(policyId);
    if (!policy) throw Error(ErrorCode::InvalidPolicy, "unknown policy " + policyId);
    if (criteria) {
        if (policy->participation.type != ParticipationType::Restricted)
            throw Error(ErrorCode::InvalidPolicy, policyId + " is democratic and takes no selection criteria");
        policy->participation.criteria = std::move(criteria);
    }
    if (ctx.maxRounds) policy->maxRounds = *ctx.maxRounds;
    if (auto violations = validatePolicyChoice(*policy, thresholdOverride); !violations.empty()) {
        std::string detail;
        for (const auto& v : violations) detail += (detail.empty() ? "" : "; ") + v;
        throw Error(ErrorCode::InvalidPolicy, detail);
    }
    auto eligible = eligibleDecisionMakers(c.involvedUsers, *policy);
    c.finalDecisionMaker = finalDecisionMaker(c.involvedUsers, *policy);
    c.eligibleDMs = std::move(eligible);
    c.adoptedPolicyId = policy->policyId;
    c.thresholdOverride = thresholdOverride;
    c.policy = std::move(policy);
    move(c, ctx, "chooseMethod", S::MethodChosen);
}

void notifyActors(Collaboration& c, CommandContext& ctx) {
    require(c, "notifyActors");
    requireModerator(c, ctx);
    move(c, ctx, "notifyActors", S::Notified);
    for (const auto& id : evaluators(c)) {
        const char* role = c.isEligible(id) ? "decisionMaker" : "advisor";
        emit(ctx, EventKind::ActorAssigned, {{"userId", id}, {"role", role}, {"policyId", c.adoptedPolicyId}}, {}, id);
    }
    for (const auto& id : evaluators(c))
        emit(ctx, EventKind::EvaluationRequested,
             {{"userId", id}, {"round", c.currentRound}, {"binding", c.isEligible(id)}, {"phase", "elaboration"}}, {},
             id);
    move(c, ctx, "advance", S::Elaboration);
}

std::string addProposal(Collaboration& c, CommandContext& ctx, const ProposalDraft& draft) {
    require(c, "addProposal");
    requireParticipant(c, ctx);
    if (c.state == S::EvaluationOpen && draft.kind != ProposalKind::Alternative)
        throw Error(ErrorCode::WrongState, "only alternative proposals can be added while evaluation is open");
    return insertProposal(c, ctx, draft);
}

void addConflict(Collaboration& c, CommandContext& ctx, const std::string& p, const std::string& q) {
    require(c, "addConflict");
    requireParticipant(c, ctx);
    if (p != q && c.proposals.contains(p) && c.proposals.contains(q) &&
        c.proposals.at(p).collectiveDecision == CollectiveStatus::Approved &&
        c.proposals.at(q).collectiveDecision == CollectiveStatus::Approved)
        throw Error(ErrorCode::InvalidProposal, "both proposals are already approved");
    c.proposals.addConflict(p, q);
}

void openEvaluation(Collaboration& c, CommandContext& ctx) {
    require(c, "openEvaluation");
    requireModerator(c, ctx);
    startRound(c, ctx, "openEvaluation");
}

std::optional<std::string> submitDecision(Collaboration& c, CommandContext& ctx, const DecisionDraft& draft) {
    require(c, "submitDecision");
    const auto& policy = c.policy.value();
    if (!c.user(ctx.actorId)) throw Error(ErrorCode::UnknownActor, ctx.actorId);
    if (!c.proposals.contains(draft.proposalId)) throw Error(ErrorCode::UnknownProposal, draft.proposalId);

    Decision d;
    d.decisionMakerId = ctx.actorId;
    d.proposalId = draft.proposalId;
    d.round = c.currentRound;
    d.kind = draft.kind;
    d.rating = draft.rating;
    if (draft.comment) d.comment = Comment{ctx.actorId, *draft.comment, ctx.at};
    d.alternativeId = draft.alternativeId;
    d.submittedAt = ctx.at;
    d.binding = c.isEligible(ctx.actorId);
    if (!d.binding && !policy.advisory)
        throw Error(ErrorCode::NotEligible, ctx.actorId + " is not an eligible decision maker");

    const auto& target = c.proposals.at(draft.proposalId);
    if (target.isLeaf() && (target.withdrawn || target.collectiveDecision != CollectiveStatus::Pending))
        throw Error(ErrorCode::InvalidProposal, draft.proposalId + " is not open for evaluation");

    std::optional<std::string> created;
    if (draft.alternative) {
        if (draft.kind != AgreementKind::Refinement)
            throw Error(ErrorCode::BadRequest, "an inline alternative accompanies a refinement only");
        if (draft.alternativeId) throw Error(ErrorCode::BadRequest, "give either alternative or alternativeId");
        auto ap = *draft.alternative;
        ap.kind = ProposalKind::Alternative;
        ap.refines = draft.proposalId;
        validateDecision([&] {
            // check everything but the alternative before creating it
            auto probe = d;
            probe.kind = AgreementKind::Approval;
            probe.comment.reset();
            return probe;
        }(), policy.coDecision.preferenceKind, c);
        created = insertProposal(c, ctx, ap);
        d.alternativeId = created;
    }
    validateDecision(d, policy.coDecision.preferenceKind, c);
    c.decisions.push_back(d);

    nlohmann::json payload = {{"decisionMakerId", d.decisionMakerId},
                              {"proposalId", d.proposalId},
                              {"round", d.round},
                              {"kind", d.kind},
                              {"binding", d.binding}};
    if (d.rating) payload["rating"] = *d.rating;
    if (d.comment) payload["comment"] = d.comment->text;
    if (d.alternativeId) payload["alternativeId"] = *d.alternativeId;
    emit(ctx, EventKind::DecisionRecorded, payload, {d.proposalId});
    return created;
}

void closeRound(Collaboration& c, CommandContext& ctx) {
    require(c, "closeRound");
    requireModerator(c, ctx);
    auto lowered = lowerRound(c, ctx.mapping, false);
    if (auto deficits = quorumDeficits(lowered.input); !deficits.empty()) {
        std::string detail = "quorum not reached for";
        for (int i : deficits) detail += " " + lowered.input.candidates[i].proposalId;
        throw Error(ErrorCode::QuorumNotReached, detail);
    }
    move(c, ctx, "closeRound", S::EvaluationClosed);
    const auto count = std::count_if(c.decisions.begin(), c.decisions.end(),
                                     [&](const auto& d) { return d.round == c.currentRound; });
    emit(ctx, EventKind::RoundClosed, {{"round", c.currentRound}, {"decisionCount", count}});
    if (ctx.autoAggregate) runAggregation(c, ctx);
}

void runAggregation(Collaboration& c, CommandContext& ctx) {
    require(c, "runAggregation");
    requireModerator(c, ctx);
    const auto& policy = c.policy.value();
    // the re-evaluation round of a single election is its last
    const bool finalPass = policy.iterative() ? c.currentRound >= policy.maxRounds : c.reevaluated;
    move(c, ctx, "runAggregation", S::Aggregated);
    aggregateAndRoute(c, ctx, finalPass);
}

void moderatorChoice(Collaboration& c, CommandContext& ctx, const ModeratorChoice& choice) {
    // reported ahead of the state check: after the re-evaluation round the
    // collaboration is already closed, and this is the more useful answer
    if (choice.kind == ModeratorChoice::Kind::Reevaluate && c.reevaluated)
        throw Error(ErrorCode::SecondReevaluation, "a collaboration is re-evaluated at most once");
    require(c, "moderatorChoice");
    requireModerator(c, ctx);
    if (choice.kind == ModeratorChoice::Kind::Reevaluate) {
        c.reevaluated = true;
        startRound(c, ctx, "moderatorChoice");
        return;
    }
    if (!choice.value) throw Error(ErrorCode::InvalidThreshold, "adjustThreshold needs a value");
    const auto& v = *choice.value;
    if (v <= 0 || v > 1) throw Error(ErrorCode::InvalidThreshold, formatFraction(v) + " is outside (0, 1]");
    if (auto violations = validatePolicyChoice(c.policy.value(), v); !violations.empty())
        throw Error(ErrorCode::InvalidThreshold, violations.front());
    c.thresholdOverride = v;
    emit(ctx, EventKind::ThresholdAdjusted, {{"round", c.currentRound}, {"value", fractionToJson(v)}});
    move(c, ctx, "moderatorChoice", S::Aggregated);
    aggregateAndRoute(c, ctx, true);
}

std::vector<std::string> adjustProposals(Collaboration& c, CommandContext& ctx, std::span<const ProposalEdit> edits) {
    require(c, "adjustProposals");
    requireParticipant(c, ctx);
    std::vector<std::string> created;
    for (const auto& e : edits) {
        if (e.op == ProposalEdit::Op::AttachAlternative) {
            auto ap = e.alternative;
            ap.kind = ProposalKind::Alternative;
            if (!e.proposalId.empty()) ap.refines = e.proposalId;
            created.push_back(insertProposal(c, ctx, ap));
            continue;
        }
        if (!c.proposals.contains(e.proposalId)) throw Error(ErrorCode::UnknownProposal, e.proposalId);
        auto& p = c.proposals.at(e.proposalId);
        if (!p.isLeaf() || p.withdrawn || p.collectiveDecision != CollectiveStatus::Pending)
            throw Error(ErrorCode::InvalidProposal, e.proposalId + " is not an open leaf proposal");
        if (e.op == ProposalEdit::Op::Withdraw) {
            p.withdrawn = true;
            p.collectiveDecision = CollectiveStatus::Rejected;
        } else {
            auto body = e.notation && ctx.relationships ? notation::canonicalize(e.body, *ctx.relationships) : e.body;
            if (body.empty()) throw Error(ErrorCode::InvalidProposal, "proposal body is empty");
            p.body = std::move(body);
        }
    }
    liftComposites(c);
    startRound(c, ctx, "adjustProposals");
    return created;
}

void to_json(nlohmann::json& j, const Command& c) {
    j = {{"collaborationId", c.collaborationId},
         {"name", c.name},
         {"actorId", c.actorId},
         {"args", c.args},
         {"at", c.at}};
}

void from_json(const nlohmann::json& j, Command& c) {
    c.collaborationId = j.value("collaborationId", "");
    c.name = j.at("name").get<std::string>();
    c.actorId = j.at("actorId").get<std::string>();
    c.args = j.value("args", nlohmann::json::object());
    c.at = j.value("at", Timestamp{0});
}

ProposalDraft proposalDraftFromJson(const nlohmann::json& j) {
    ProposalDraft d;
    if (auto k = optionalArg<std::string>(j, "kind")) d.kind = parseEnum<ProposalKind>(*k);
    d.title = j.value("title", "");
    d.body = j.value("body", "");
    d.refines = optionalArg<std::string>(j, "refines");
    d.conflictual = j.value("conflictual", false);
    d.children = j.value("children", std::vector<std::string>{});
    d.notation = j.value("notation", false);
    return d;
}

DecisionDraft decisionDraftFromJson(const nlohmann::json& j) {
    DecisionDraft d;
    d.proposalId = requiredString(j, "proposalId");
    d.kind = parseEnum<AgreementKind>(requiredString(j, "kind"));
    d.rating = optionalArg<int>(j, "rating");
    d.comment = optionalArg<std::string>(j, "comment");
    d.alternativeId = optionalArg<std::string>(j, "alternativeId");
    if (auto it = j.find("alternative"); it != j.end() && !it->is_null()) {
        auto ap = proposalDraftFromJson(*it);
        ap.kind = ProposalKind::Alternative;
        d.alternative = ap;
    }
    return d;
}

nlohmann::json apply(Collaboration& c, CommandContext& ctx, const Command& cmd) {
    nlohmann::json result = nlohmann::json::object();
    const auto& a = cmd.args;
    try {
        const auto& n = cmd.name;
        if (n == "defineSituation") {
            defineSituation(c, ctx, a.value("intent", ""), optionalArg<Timestamp>(a, "deadline"));
        } else if (n == "addUser") {
            addUser(c, ctx, a.at("user").get<InvolvedUser>());
        } else if (n == "removeUser") {
            removeUser(c, ctx, requiredString(a, "userId"));
        } else if (n == "chooseMethod") {
            std::optional<Fraction> override;
            if (auto it = a.find("thresholdOverride"); it != a.end() && !it->is_null()) override = fractionFromJson(*it);
            chooseMethod(c, ctx, requiredString(a, "policyId"), override,
                         optionalArg<SelectionCriteria>(a, "criteria"));
        } else if (n == "notifyActors") {
            notifyActors(c, ctx);
        } else if (n == "addProposal") {
            result["proposalId"] = addProposal(c, ctx, proposalDraftFromJson(a));
        } else if (n == "addConflict") {
            addConflict(c, ctx, requiredString(a, "proposalId"), requiredString(a, "with"));
        } else if (n == "openEvaluation") {
            openEvaluation(c, ctx);
        } else if (n == "submitDecision") {
            if (auto id = submitDecision(c, ctx, decisionDraftFromJson(a))) result["alternativeId"] = *id;
        } else if (n == "closeRound") {
            closeRound(c, ctx);
        } else if (n == "runAggregation") {
            runAggregation(c, ctx);
        } else if (n == "moderatorChoice") {
            ModeratorChoice choice;
            const auto kind = requiredString(a, "choice");
            if (kind == "adjustThreshold") {
                choice.kind = ModeratorChoice::Kind::AdjustThreshold;
                if (auto it = a.find("value"); it != a.end() && !it->is_null()) choice.value = fractionFromJson(*it);
            } else if (kind != "reevaluate") {
                throw Error(ErrorCode::BadRequest, "choice must be adjustThreshold or reevaluate");
            }
            moderatorChoice(c, ctx, choice);
        } else if (n == "adjustProposals") {
            std::vector<ProposalEdit> edits;
            for (const auto& e : a.value("edits", nlohmann::json::array())) {
                ProposalEdit edit;
                const auto op = requiredString(e, "op");
                edit.proposalId = e.value("proposalId", "");
                if (op == "withdraw") {
                    edit.op = ProposalEdit::Op::Withdraw;
                } else if (op == "revise") {
                    edit.op = ProposalEdit::Op::Revise;
                    edit.body = requiredString(e, "body");
                    edit.notation = e.value("notation", false);
                } else if (op == "attachAlternative") {
                    edit.op = ProposalEdit::Op::AttachAlternative;
                    edit.alternative = proposalDraftFromJson(e.at("alternative"));
                } else {
                    throw Error(ErrorCode::BadRequest, "unknown edit op '" + op + "'");
                }
                edits.push_back(std::move(edit));
            }
            result["createdProposalIds"] = adjustProposals(c, ctx, edits);
        } else {
            throw Error(ErrorCode::BadRequest, "unknown command '" + n + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadRequest, e.what());
    }
    if (needsRoute(c)) throw Error(ErrorCode::WrongState, "aggregation left unrouted");
    result["state"] = c.state;
    result["currentRound"] = c.currentRound;
    return result;
}

}  // namespace gdm
