#pragma once

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/fraction.hpp"
#include "gdm/model.hpp"
#include "gdm/vocabulary.hpp"

namespace gdm {

struct CoDecisionMethod {
    DecisionProcessKind processKind = DecisionProcessKind::DirectVote;
    AgreementThreshold threshold = AgreementThreshold::Medium;
    PreferenceKind preferenceKind = PreferenceKind::YesNo;

    bool operator==(const CoDecisionMethod&) const = default;
};

// Placeholder accepted in explicitUserIds that resolves to the moderator of
// whichever collaboration adopts the policy.
inline constexpr std::string_view kModeratorPlaceholder = "@moderator";

/// Conjunction of up to three clauses; absent clauses are not checked.
struct SelectionCriteria {
    std::optional<Fraction> minExpertise;
    std::optional<std::set<std::string>> allowedViewpoints;
    std::optional<std::set<std::string>> explicitUserIds;

    bool hasClause() const { return minExpertise || allowedViewpoints || explicitUserIds; }
    bool matches(const InvolvedUser& user, const std::string& moderatorId) const;

    bool operator==(const SelectionCriteria&) const = default;
};

struct ParticipationMethod {
    ParticipationType type = ParticipationType::Democratic;
    std::optional<SelectionCriteria> criteria;

    bool operator==(const ParticipationMethod&) const = default;
};

/// Manual entry describing a policy in pattern form.
struct PatternDescriptor {
    std::string name;
    std::string intent;
    std::vector<std::string> applications;
    std::string solution;
    std::vector<std::string> knownUses;
    std::vector<std::string> relatedPatterns;

    bool operator==(const PatternDescriptor&) const = default;
};

struct DecisionPolicy {
    std::string policyId;  // equal to descriptor.name for every registered policy
    PatternDescriptor descriptor;
    CoDecisionMethod coDecision;
    ParticipationMethod participation;
    IterationClass iterationClass = IterationClass::SingleElection;
    int maxRounds = 5;
    bool advisory = false;

    const std::string& name() const { return descriptor.name; }
    bool iterative() const { return iterationClass == IterationClass::Iterative; }
    bool operator==(const DecisionPolicy&) const = default;
};

inline constexpr int kDefaultMaxRounds = 5;

// The five stock policies, in manual order.
std::vector<DecisionPolicy> builtinPolicies();

// Structural check; never throws. Empty result means valid.
std::vector<std::string> validatePolicy(const DecisionPolicy& policy);

// validatePolicy plus the constraints a threshold override places on named
// policies (consensus stays unanimous, negotiation stays below unanimity).
std::vector<std::string> validatePolicyChoice(const DecisionPolicy& policy,
                                              const std::optional<Fraction>& thresholdOverride);

// Democratic: every involved user. Restricted: users matching the criteria.
// Throws NoEligibleActors when the result would be empty.
std::set<std::string> eligibleDecisionMakers(std::span<const InvolvedUser> users, const DecisionPolicy& policy);

// For advisory policies, the single user whose decision is binding.
std::optional<std::string> finalDecisionMaker(std::span<const InvolvedUser> users, const DecisionPolicy& policy);

/// Registry of named policies. Registration is serialized; lookups may run
/// concurrently with each other.
class PolicyRepository {
public:
    // Preloads the builtin policies.
    PolicyRepository();

    // Throws InvalidPolicy (with the violation list) or DuplicatePolicy.
    void add(DecisionPolicy policy);

    std::optional<DecisionPolicy> find(const std::string& name) const;
    DecisionPolicy get(const std::string& name) const;  // throws UnknownPolicy
    PatternDescriptor describe(const std::string& name) const;
    std::vector<std::string> names() const;  // registration order

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, DecisionPolicy> policies_;
    std::vector<std::string> order_;
};

void to_json(nlohmann::json& j, const CoDecisionMethod& m);
void from_json(const nlohmann::json& j, CoDecisionMethod& m);
void to_json(nlohmann::json& j, const SelectionCriteria& c);
void from_json(const nlohmann::json& j, SelectionCriteria& c);
void to_json(nlohmann::json& j, const ParticipationMethod& m);
void from_json(const nlohmann::json& j, ParticipationMethod& m);
void to_json(nlohmann::json& j, const PatternDescriptor& d);
void from_json(const nlohmann::json& j, PatternDescriptor& d);
void to_json(nlohmann::json& j, const DecisionPolicy& p);
void from_json(const nlohmann::json& j, DecisionPolicy& p);

// Plain-text manual page for one policy.
std::string renderManual(const DecisionPolicy& policy);

}  // namespace gdm
