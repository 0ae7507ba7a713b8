#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/collaboration.hpp"
#include "gdm/engine.hpp"

namespace gdm {

inline constexpr Timestamp kDefaultScriptStart = 1700000000000;

/// Exit codes shared by `gdm run`.
enum class ScriptStatus { Converged = 0, Unresolved = 2, ScriptError = 3, EngineError = 4 };

struct StepRecord {
    std::size_t index = 0;
    std::string actor;
    std::string command;
    nlohmann::json result;          // on success
    std::optional<std::string> error;  // error code name on failure
};

struct ScriptResult {
    ScriptStatus status = ScriptStatus::ScriptError;
    std::string message;
    std::string collaborationId;
    std::optional<Collaboration> collaboration;
    std::vector<StepRecord> steps;
    std::map<std::string, std::string> aliases;
};

// Script shape:
//   { "intent": "...", "startAt": 1700000000000, "collaborationId": "...",
//     "actors": [ InvolvedUser... ],
//     "steps": [ {"actor": "a", "command": "addProposal", "args": {...},
//                 "as": "p1", "expectError": "WrongState"}, ... ] }
// A step's `as` captures the id it created; any "$name" string in later args
// is replaced by that id. Step i runs at startAt + 1000 * (i + 1), the
// collaboration itself is created at startAt by the moderator.
ScriptResult runScript(Engine& engine, const nlohmann::json& script);

}  // namespace gdm
