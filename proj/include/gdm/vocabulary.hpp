#pragma once

// Closed enumerations shared across modules, with their canonical
// lowerCamelCase wire names.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "gdm/error.hpp"

namespace gdm {

using Timestamp = std::int64_t;  // UTC milliseconds since the epoch

enum class AgreementKind { Approval, Reject, Refinement };

enum class CollectiveStatus { Pending, Approved, Rejected, Unresolved };

enum class DecisionProcessKind { DirectVote, Consensus2Vote, Negotiation2Vote };

enum class AgreementThreshold { Low, Medium, High, Strict };

enum class PreferenceKind { Rating, YesNo };

enum class ParticipationType { Democratic, Restricted };

enum class IterationClass { SingleElection, Iterative };

enum class ProposalKind { Elementary, Alternative, Composite };

enum class LifecycleState {
    Draft,
    Configured,
    MethodChosen,
    Notified,
    Elaboration,
    EvaluationOpen,
    EvaluationClosed,
    Aggregated,
    AdjustingProposals,
    AwaitingModeratorChoice,
    Closed,
};

template <class E>
struct EnumNames;

#define GDM_ENUM_NAMES(E, ...)                                                   \
    template <>                                                                  \
    struct EnumNames<E> {                                                        \
        static constexpr auto values = std::to_array<std::pair<E, std::string_view>>({__VA_ARGS__}); \
    };

GDM_ENUM_NAMES(AgreementKind,
               {AgreementKind::Approval, "approval"},
               {AgreementKind::Reject, "reject"},
               {AgreementKind::Refinement, "refinement"})
GDM_ENUM_NAMES(CollectiveStatus,
               {CollectiveStatus::Pending, "pending"},
               {CollectiveStatus::Approved, "approved"},
               {CollectiveStatus::Rejected, "rejected"},
               {CollectiveStatus::Unresolved, "unresolved"})
GDM_ENUM_NAMES(DecisionProcessKind,
               {DecisionProcessKind::DirectVote, "directVote"},
               {DecisionProcessKind::Consensus2Vote, "consensus2vote"},
               {DecisionProcessKind::Negotiation2Vote, "negotiation2vote"})
GDM_ENUM_NAMES(AgreementThreshold,
               {AgreementThreshold::Low, "low"},
               {AgreementThreshold::Medium, "medium"},
               {AgreementThreshold::High, "high"},
               {AgreementThreshold::Strict, "strict"})
GDM_ENUM_NAMES(PreferenceKind,
               {PreferenceKind::Rating, "rating"},
               {PreferenceKind::YesNo, "yesNo"})
GDM_ENUM_NAMES(ParticipationType,
               {ParticipationType::Democratic, "democratic"},
               {ParticipationType::Restricted, "restricted"})
GDM_ENUM_NAMES(IterationClass,
               {IterationClass::SingleElection, "singleElection"},
               {IterationClass::Iterative, "iterative"})
GDM_ENUM_NAMES(ProposalKind,
               {ProposalKind::Elementary, "elementary"},
               {ProposalKind::Alternative, "alternative"},
               {ProposalKind::Composite, "composite"})
GDM_ENUM_NAMES(LifecycleState,
               {LifecycleState::Draft, "Draft"},
               {LifecycleState::Configured, "Configured"},
               {LifecycleState::MethodChosen, "MethodChosen"},
               {LifecycleState::Notified, "Notified"},
               {LifecycleState::Elaboration, "Elaboration"},
               {LifecycleState::EvaluationOpen, "EvaluationOpen"},
               {LifecycleState::EvaluationClosed, "EvaluationClosed"},
               {LifecycleState::Aggregated, "Aggregated"},
               {LifecycleState::AdjustingProposals, "AdjustingProposals"},
               {LifecycleState::AwaitingModeratorChoice, "AwaitingModeratorChoice"},
               {LifecycleState::Closed, "Closed"})

#undef GDM_ENUM_NAMES

template <class E>
constexpr std::string_view name(E value) {
    for (const auto& [v, n] : EnumNames<E>::values)
        if (v == value) return n;
    return "?";
}

template <class E>
E parseEnum(std::string_view text) {
    for (const auto& [v, n] : EnumNames<E>::values)
        if (n == text) return v;
    throw Error(ErrorCode::BadRequest, "unknown enumeration value '" + std::string(text) + "'");
}

template <class E, class = decltype(EnumNames<E>::values)>
void to_json(nlohmann::json& j, E value) {
    j = std::string(name(value));
}

template <class E, class = decltype(EnumNames<E>::values)>
void from_json(const nlohmann::json& j, E& value) {
    if (!j.is_string()) throw Error(ErrorCode::BadRequest, "expected a string, got " + j.dump());
    value = parseEnum<E>(j.get_ref<const std::string&>());
}

}  // namespace gdm
