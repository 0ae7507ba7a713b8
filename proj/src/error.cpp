#include "gdm/error.hpp"

namespace gdm {

std::string_view codeName(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingComment: return "MissingComment";
        case ErrorCode::MissingAlternative: return "MissingAlternative";
        case ErrorCode::NotEligible: return "NotEligible";
        case ErrorCode::RatingModeMismatch: return "RatingModeMismatch";
        case ErrorCode::SelfConflict: return "SelfConflict";
        case ErrorCode::UnknownProposal: return "UnknownProposal";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::InvalidProposal: return "InvalidProposal";
        case ErrorCode::InvalidMembership: return "InvalidMembership";
        case ErrorCode::UnknownPolicy: return "UnknownPolicy";
        case ErrorCode::DuplicatePolicy: return "DuplicatePolicy";
        case ErrorCode::InvalidPolicy: return "InvalidPolicy";
        case ErrorCode::NoEligibleActors: return "NoEligibleActors";
        case ErrorCode::EmptyRound: return "EmptyRound";
        case ErrorCode::QuorumNotReached: return "QuorumNotReached";
        case ErrorCode::NotModerator: return "NotModerator";
        case ErrorCode::WrongState: return "WrongState";
        case ErrorCode::SecondReevaluation: return "SecondReevaluation";
        case ErrorCode::InvalidThreshold: return "InvalidThreshold";
        case ErrorCode::UnknownCollaboration: return "UnknownCollaboration";
        case ErrorCode::UnknownActor: return "UnknownActor";
        case ErrorCode::UnknownSubject: return "UnknownSubject";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownRelationship: return "UnknownRelationship";
        case ErrorCode::ArrowMismatch: return "ArrowMismatch";
        case ErrorCode::DuplicateName: return "DuplicateName";
        case ErrorCode::UnknownParent: return "UnknownParent";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::BadRequest: return "BadRequest";
        case ErrorCode::Unauthorized: return "Unauthorized";
        case ErrorCode::ScriptError: return "ScriptError";
    }
    return "Unknown";
}

}  // namespace gdm
