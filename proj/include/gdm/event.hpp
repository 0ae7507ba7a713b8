#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/vocabulary.hpp"

namespace gdm {

enum class EventKind {
    ActorAssigned,
    ProposalCreated,
    AlternativeProposed,
    EvaluationRequested,
    DecisionRecorded,
    RoundClosed,
    ThresholdMissed,
    ThresholdAdjusted,
    CollectiveDecisionPublished,
    CollaborationClosed,
};

std::string_view name(EventKind kind);
EventKind parseEventKind(std::string_view text);

struct Event {
    std::uint64_t seq = 0;  // per collaboration, gap-free from 1
    std::string collaborationId;
    EventKind kind = EventKind::ActorAssigned;
    nlohmann::json payload;
    Timestamp at = 0;

    bool operator==(const Event&) const = default;
};

/// What a producer hands to the bus: the bus assigns seq and timestamp.
/// `subjects` are proposal ids the event concerns (the collaboration itself is
/// always a subject); `recipient` addresses one observer directly.
struct EventDraft {
    EventKind kind = EventKind::ActorAssigned;
    nlohmann::json payload = nlohmann::json::object();
    std::vector<std::string> subjects;
    std::optional<std::string> recipient;
};

void to_json(nlohmann::json& j, const Event& e);
void from_json(const nlohmann::json& j, Event& e);

}  // namespace gdm
