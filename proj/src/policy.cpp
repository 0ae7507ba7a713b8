#include "gdm/policy.hpp"

#include <mutex>
#include <sstream>

#include "gdm/error.hpp"

namespace gdm {

namespace {

std::string moderatorOf(std::span<const InvolvedUser> users) {
    for (const auto& u : users)
        if (u.isModerator) return u.userId;
    return {};
}

PatternDescriptor majorityDecidingManual() {
    return {
        "MajorityDeciding",
        "Reach a decision that takes into account the opinions of all the stakeholders. "
        "The proposal(s) approved by the majority of the group is (are) adopted.",
        {"decision makers competencies and weights are almost equal.",
         "time constraints: it requires less time since it is done in a single turn."},
        "This pattern enactment goes through five steps. First, the moderator defines the collaboration "
        "characteristics (intent and duration). Then, he/she sets the threshold and preferenceKind of the "
        "codecision method (the processKind is set to voteDirect). Afterwards, he/she notifies the actors "
        "concerned to whom he/she assigns the role decision maker. If the proposals are not already "
        "established, decision makers start by drawing up the list of proposals. Then, they express their "
        "individual preferences. At the end, a tool (or possibly the moderator) aggregates individual "
        "preferences and proposals exceeding the threshold are approved and constitute the group decision. "
        "Several proposals can be approved if they are not conflicting.",
        {"Single-round elections either held in face-to-face or by electronic vote."},
        {"Delegating",
         "Majority Deciding and Delegating differ in the type of participation and the actors' weight. "
         "Delegating makes a prior choice of the involved actors while Majority deciding is democratic."},
    };
}

SelectionCriteria moderatorOnly() {
    SelectionCriteria c;
    c.explicitUserIds = std::set<std::string>{std::string(kModeratorPlaceholder)};
    return c;
}

}  // namespace

bool SelectionCriteria::matches(const InvolvedUser& user, const std::string& moderatorId) const {
    if (minExpertise && user.expertiseLevel < *minExpertise) return false;
    if (allowedViewpoints && (!user.viewpoint || !allowedViewpoints->count(*user.viewpoint))) return false;
    if (explicitUserIds) {
        bool listed = explicitUserIds->count(user.userId) != 0 ||
                      (user.userId == moderatorId && explicitUserIds->count(std::string(kModeratorPlaceholder)));
        if (!listed) return false;
    }
    return true;
}

std::vector<DecisionPolicy> builtinPolicies() {
    std::vector<DecisionPolicy> out;

    DecisionPolicy delegating;
    delegating.descriptor = {
        "Delegating",
        "Hand the decision to one person or to a subset of the stakeholders chosen beforehand.",
        {"some stakeholders hold clearly more relevant expertise than others.",
         "the group accepts a prior choice of who decides."},
        "The moderator states the selection criteria of the delegates. Only the delegates evaluate; their "
        "preferences are aggregated with the chosen process kind and threshold, in one or several rounds.",
        {"Steering committees deciding on behalf of a project team."},
        {"MajorityDeciding", "TakingAdvice"},
    };
    delegating.coDecision = {DecisionProcessKind::DirectVote, AgreementThreshold::Medium, PreferenceKind::YesNo};
    delegating.participation = {ParticipationType::Restricted, moderatorOnly()};
    delegating.iterationClass = IterationClass::Iterative;
    out.push_back(delegating);

    DecisionPolicy advice;
    advice.descriptor = {
        "TakingAdvice",
        "One decision maker decides alone after collecting the advice of the other stakeholders.",
        {"accountability rests with a single person.", "the advice is informative, not binding."},
        "Every involved user may submit an evaluation; only the final decision maker's evaluation is binding "
        "and it alone determines the collective decision, in a single turn.",
        {"Technical leads consulting their team before an architecture decision."},
        {"Delegating"},
    };
    advice.coDecision = {DecisionProcessKind::DirectVote, AgreementThreshold::Medium, PreferenceKind::YesNo};
    advice.participation = {ParticipationType::Restricted, moderatorOnly()};
    advice.iterationClass = IterationClass::SingleElection;
    advice.advisory = true;
    out.push_back(advice);

    DecisionPolicy majority;
    majority.descriptor = majorityDecidingManual();
    majority.coDecision = {DecisionProcessKind::DirectVote, AgreementThreshold::Low, PreferenceKind::YesNo};
    majority.participation = {ParticipationType::Democratic, std::nullopt};
    majority.iterationClass = IterationClass::SingleElection;
    out.push_back(majority);

    DecisionPolicy consenting;
    consenting.descriptor = {
        "ConsentingTogether",
        "Adopt only the proposals every decision maker accepts.",
        {"the outcome must be carried by the whole group.", "there is time for several rounds."},
        "Decision makers evaluate, the tool aggregates against a unanimous threshold, and proposals are "
        "adjusted between rounds until each one is accepted by all or the round budget runs out.",
        {"Consensus-based standardization committees."},
        {"NegotiatingTogether"},
    };
    consenting.coDecision = {DecisionProcessKind::Consensus2Vote, AgreementThreshold::Strict,
                             PreferenceKind::YesNo};
    consenting.participation = {ParticipationType::Democratic, std::nullopt};
    consenting.iterationClass = IterationClass::Iterative;
    out.push_back(consenting);

    DecisionPolicy negotiating;
    negotiating.descriptor = {
        "NegotiatingTogether",
        "Converge through successive rounds of adjustment on proposals a large share of the group accepts.",
        {"positions diverge but the group wants a broadly shared result.", "there is time for several rounds."},
        "Decision makers evaluate, the tool aggregates against a threshold below unanimity, and contested "
        "proposals are adjusted and re-evaluated until they reach it or the round budget runs out.",
        {"Design reviews iterating on contested interface decisions."},
        {"ConsentingTogether"},
    };
    negotiating.coDecision = {DecisionProcessKind::Negotiation2Vote, AgreementThreshold::High,
                              PreferenceKind::YesNo};
    negotiating.participation = {ParticipationType::Democratic, std::nullopt};
    negotiating.iterationClass = IterationClass::Iterative;
    out.push_back(negotiating);

    for (auto& p : out) p.policyId = p.descriptor.name;
    return out;
}

std::vector<std::string> validatePolicy(const DecisionPolicy& p) {
    std::vector<std::string> v;
    const auto& name = p.descriptor.name;
    if (name.empty()) v.emplace_back("descriptor name must not be empty");
    if (!p.policyId.empty() && p.policyId != name) v.emplace_back("policyId must equal the descriptor name");
    if (p.maxRounds < 1) v.emplace_back("maxRounds must be positive");

    const auto& part = p.participation;
    if (part.type == ParticipationType::Democratic && part.criteria)
        v.emplace_back("democratic participation takes no selection criteria");
    if (part.type == ParticipationType::Restricted) {
        if (!part.criteria || !part.criteria->hasClause())
            v.emplace_back("restricted participation requires selection criteria");
    }
    if (part.criteria) {
        const auto& c = *part.criteria;
        if (c.minExpertise && *c.minExpertise <= 0) v.emplace_back("minExpertise must be positive");
        if (c.explicitUserIds && c.explicitUserIds->empty()) v.emplace_back("explicitUserIds must not be empty");
        if (c.allowedViewpoints && c.allowedViewpoints->empty())
            v.emplace_back("allowedViewpoints must not be empty");
    }

    const auto threshold = p.coDecision.threshold;
    if (name == "ConsentingTogether") {
        if (threshold != AgreementThreshold::Strict) v.emplace_back("ConsentingTogether: strict required");
        if (!p.iterative()) v.emplace_back("ConsentingTogether: iterative required");
    }
    if (name == "NegotiatingTogether") {
        if (threshold == AgreementThreshold::Strict) v.emplace_back("NegotiatingTogether: threshold below strict required");
        if (!p.iterative()) v.emplace_back("NegotiatingTogether: iterative required");
    }
    if (name == "MajorityDeciding") {
        if (part.type != ParticipationType::Democratic) v.emplace_back("MajorityDeciding: democratic required");
        if (p.coDecision.processKind != DecisionProcessKind::DirectVote)
            v.emplace_back("MajorityDeciding: directVote required");
        if (p.iterative()) v.emplace_back("MajorityDeciding: singleElection required");
    }
    if ((name == "Delegating" || name == "TakingAdvice") && part.type != ParticipationType::Restricted)
        v.emplace_back(name + ": restricted participation required");
    if (name == "TakingAdvice" && !p.advisory) v.emplace_back("TakingAdvice: advisory required");

    if (p.advisory) {
        if (p.iterative()) v.emplace_back("advisory policies are single-election");
        if (part.type != ParticipationType::Restricted || !part.criteria || !part.criteria->explicitUserIds ||
            part.criteria->explicitUserIds->size() != 1)
            v.emplace_back("advisory policies designate exactly one final decision maker via explicitUserIds");
    }
    return v;
}

std::vector<std::string> validatePolicyChoice(const DecisionPolicy& p, const std::optional<Fraction>& override) {
    auto v = validatePolicy(p);
    if (!override) return v;
    if (*override <= 0 || *override > 1) v.emplace_back("threshold override must lie in (0,1]");
    if (p.coDecision.threshold == AgreementThreshold::Strict && *override != 1)
        v.emplace_back(p.name() + ": strict required");
    if (p.name() == "NegotiatingTogether" && *override == 1)
        v.emplace_back("NegotiatingTogether: threshold below strict required");
    return v;
}

std::set<std::string> eligibleDecisionMakers(std::span<const InvolvedUser> users, const DecisionPolicy& policy) {
    std::set<std::string> out;
    const auto moderator = moderatorOf(users);
    for (const auto& u : users) {
        if (policy.participation.type == ParticipationType::Democratic ||
            (policy.participation.criteria && policy.participation.criteria->matches(u, moderator)))
            out.insert(u.userId);
    }
    if (out.empty())
        throw Error(ErrorCode::NoEligibleActors, "no involved user satisfies the criteria of " + policy.name());
    return out;
}

std::optional<std::string> finalDecisionMaker(std::span<const InvolvedUser> users, const DecisionPolicy& policy) {
    if (!policy.advisory) return std::nullopt;
    auto eligible = eligibleDecisionMakers(users, policy);
    return *eligible.begin();
}

PolicyRepository::PolicyRepository() {
    for (auto& p : builtinPolicies()) add(std::move(p));
}

void PolicyRepository::add(DecisionPolicy policy) {
    if (policy.policyId.empty()) policy.policyId = policy.descriptor.name;
    if (auto violations = validatePolicy(policy); !violations.empty()) {
        std::string detail;
        for (const auto& s : violations) detail += (detail.empty() ? "" : "; ") + s;
        throw Error(ErrorCode::InvalidPolicy, detail);
    }
    std::unique_lock lock(mutex_);
    if (policies_.count(policy.name())) throw Error(ErrorCode::DuplicatePolicy, policy.name());
    order_.push_back(policy.name());
    policies_.emplace(policy.name(), std::move(policy));
}

std::optional<DecisionPolicy> PolicyRepository::find(const std::string& name) const {
    std::shared_lock lock(mutex_);
    if (auto it = policies_.find(name); it != policies_.end()) return it->second;
    return std::nullopt;
}

DecisionPolicy PolicyRepository::get(const std::string& name) const {
    auto p = find(name);
    if (!p) throw Error(ErrorCode::UnknownPolicy, name);
    return *p;
}

PatternDescriptor PolicyRepository::describe(const std::string& name) const { return get(name).descriptor; }

std::vector<std::string> PolicyRepository::names() const {
    std::shared_lock lock(mutex_);
    return order_;
}

void to_json(nlohmann::json& j, const CoDecisionMethod& m) {
    j = {{"processKind", m.processKind}, {"threshold", m.threshold}, {"preferenceKind", m.preferenceKind}};
}

void from_json(const nlohmann::json& j, CoDecisionMethod& m) {
    m.processKind = j.at("processKind").get<DecisionProcessKind>();
    m.threshold = j.at("threshold").get<AgreementThreshold>();
    m.preferenceKind = j.at("preferenceKind").get<PreferenceKind>();
}

void to_json(nlohmann::json& j, const SelectionCriteria& c) {
    j = nlohmann::json::object();
    if (c.minExpertise) j["minExpertise"] = fractionToJson(*c.minExpertise);
    if (c.allowedViewpoints) j["allowedViewpoints"] = *c.allowedViewpoints;
    if (c.explicitUserIds) j["explicitUserIds"] = *c.explicitUserIds;
}

void from_json(const nlohmann::json& j, SelectionCriteria& c) {
    c = {};
    if (j.contains("minExpertise")) c.minExpertise = fractionFromJson(j.at("minExpertise"));
    if (j.contains("allowedViewpoints")) c.allowedViewpoints = j.at("allowedViewpoints").get<std::set<std::string>>();
    if (j.contains("explicitUserIds")) c.explicitUserIds = j.at("explicitUserIds").get<std::set<std::string>>();
}

void to_json(nlohmann::json& j, const ParticipationMethod& m) {
    j = {{"type", m.type}};
    if (m.criteria) j["criteria"] = *m.criteria;
}

void from_json(const nlohmann::json& j, ParticipationMethod& m) {
    m.type = j.at("type").get<ParticipationType>();
    if (j.contains("criteria") && !j.at("criteria").is_null())
        m.criteria = j.at("criteria").get<SelectionCriteria>();
    else
        m.criteria.reset();
}

void to_json(nlohmann::json& j, const PatternDescriptor& d) {
    j = {{"name", d.name},
         {"intent", d.intent},
         {"applications", d.applications},
         {"solution", d.solution},
         {"knownUses", d.knownUses},
         {"relatedPatterns", d.relatedPatterns}};
}

void from_json(const nlohmann::json& j, PatternDescriptor& d) {
    d.name = j.at("name").get<std::string>();
    d.intent = j.value("intent", std::string{});
    d.applications = j.value("applications", std::vector<std::string>{});
    d.solution = j.value("solution", std::string{});
    d.knownUses = j.value("knownUses", std::vector<std::string>{});
    d.relatedPatterns = j.value("relatedPatterns", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const DecisionPolicy& p) {
    j = {{"policyId", p.policyId},
         {"descriptor", p.descriptor},
         {"coDecision", p.coDecision},
         {"participation", p.participation},
         {"iterationClass", p.iterationClass},
         {"maxRounds", p.maxRounds},
         {"advisory", p.advisory}};
}

void from_json(const nlohmann::json& j, DecisionPolicy& p) {
    p.descriptor = j.at("descriptor").get<PatternDescriptor>();
    p.policyId = j.value("policyId", p.descriptor.name);
    p.coDecision = j.at("coDecision").get<CoDecisionMethod>();
    p.participation = j.at("participation").get<ParticipationMethod>();
    p.iterationClass = j.at("iterationClass").get<IterationClass>();
    p.maxRounds = j.value("maxRounds", kDefaultMaxRounds);
    p.advisory = j.value("advisory", false);
}

std::string renderManual(const DecisionPolicy& policy) {
    const auto& d = policy.descriptor;
    std::ostringstream out;
    out << "Name:         " << d.name << "\n";
    out << "Intent:       " << d.intent << "\n";
    out << "Applications: This pattern is to be used in case:\n";
    for (const auto& a : d.applications) out << "              - " << a << "\n";
    out << "Known uses:   ";
    for (std::size_t i = 0; i < d.knownUses.size(); ++i) out << (i ? "\n              " : "") << d.knownUses[i];
    out << "\nSolution:     " << d.solution << "\n";
    out << "Related patterns:\n";
    for (const auto& r : d.relatedPatterns) out << "              " << r << "\n";
    out << "Configuration: participation=" << name(policy.participation.type)
        << " processKind=" << name(policy.coDecision.processKind)
        << " threshold=" << name(policy.coDecision.threshold)
        << " preferenceKind=" << name(policy.coDecision.preferenceKind)
        << " iterationClass=" << name(policy.iterationClass);
    if (policy.iterative()) out << " maxRounds=" << policy.maxRounds;
    if (policy.advisory) out << " advisory";
    out << "\n";
    return out.str();
}

}  // namespace gdm
