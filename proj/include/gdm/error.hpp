#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gdm {

// Machine-readable failure codes shared by every module. The names are part
// of the wire contract (HTTP error bodies, CLI diagnostics).
enum class ErrorCode {
    // domain-model
    MissingComment,
    MissingAlternative,
    NotEligible,
    RatingModeMismatch,
    SelfConflict,
    UnknownProposal,
    CycleDetected,
    InvalidProposal,
    InvalidMembership,
    // policy-repository
    UnknownPolicy,
    DuplicatePolicy,
    InvalidPolicy,
    NoEligibleActors,
    // aggregation-engine
    EmptyRound,
    QuorumNotReached,
    // collaboration-lifecycle
    NotModerator,
    WrongState,
    SecondReevaluation,
    InvalidThreshold,
    UnknownCollaboration,
    UnknownActor,
    // notification-bus
    UnknownSubject,
    // correspondence-notation
    SyntaxError,
    UnknownRelationship,
    ArrowMismatch,
    DuplicateName,
    UnknownParent,
    // service-and-persistence
    CorruptLog,
    BadRequest,
    Unauthorized,
    // cli
    ScriptError,
};

std::string_view codeName(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(codeName(code)) + ": " + detail),
          code_(code),
          detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace gdm
