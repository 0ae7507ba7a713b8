#include "gdm/script.hpp"

#include <set>

#include "gdm/error.hpp"

namespace gdm {

namespace {

nlohmann::json substitute(const nlohmann::json& j, const std::map<std::string, std::string>& aliases) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s.size() > 1 && s.front() == '$') {
            auto it = aliases.find(s.substr(1));
            if (it == aliases.end()) throw Error(ErrorCode::ScriptError, "unknown alias " + s);
            return it->second;
        }
        return j;
    }
    if (j.is_array()) {
        auto out = nlohmann::json::array();
        for (const auto& v : j) out.push_back(substitute(v, aliases));
        return out;
    }
    if (j.is_object()) {
        auto out = nlohmann::json::object();
        for (const auto& [k, v] : j.items()) out[k] = substitute(v, aliases);
        return out;
    }
    return j;
}

std::optional<std::string> createdId(const nlohmann::json& result) {
    for (const char* key : {"proposalId", "alternativeId"})
        if (auto it = result.find(key); it != result.end() && it->is_string()) return it->get<std::string>();
    if (auto it = result.find("createdProposalIds"); it != result.end() && it->is_array() && it->size() == 1)
        return it->front().get<std::string>();
    return std::nullopt;
}

}  // namespace

ScriptResult runScript(Engine& engine, const nlohmann::json& script) {
    ScriptResult out;
    try {
        if (!script.is_object()) throw Error(ErrorCode::ScriptError, "script must be a JSON object");
        const Timestamp start = script.value("startAt", kDefaultScriptStart);
        const auto& actors = script.at("actors");
        std::string moderator;
        for (const auto& a : actors)
            if (a.value("isModerator", false)) moderator = a.at("userId").get<std::string>();
        if (moderator.empty()) throw Error(ErrorCode::ScriptError, "no actor is marked as moderator");

        std::set<std::string> declared;
        for (const auto& a : actors) declared.insert(a.at("userId").get<std::string>());
        const auto steps = script.value("steps", nlohmann::json::array());
        if (!steps.is_array() || steps.empty()) throw Error(ErrorCode::ScriptError, "no steps");
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (!declared.count(steps[i].at("actor").get<std::string>()))
                throw Error(ErrorCode::ScriptError, "step " + std::to_string(i) + ": undeclared actor " +
                                                        steps[i]["actor"].get<std::string>());

        nlohmann::json createArgs = {{"users", actors}, {"intent", script.value("intent", "")}};
        if (script.contains("collaborationId")) createArgs["collaborationId"] = script["collaborationId"];
        try {
            auto created = engine.create(moderator, createArgs, start);
            out.collaborationId = created.collaboration.collaborationId;
            out.collaboration = created.collaboration;
        } catch (const Error& e) {
            out.status = ScriptStatus::EngineError;
            out.message = std::string("createCollaboration: ") + e.what();
            return out;
        }

        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto& step = steps[i];
            StepRecord rec;
            rec.index = i;
            rec.actor = step.at("actor").get<std::string>();
            rec.command = step.at("command").get<std::string>();
            const auto expected = step.value("expectError", "");

            Command cmd;
            cmd.collaborationId = out.collaborationId;
            cmd.name = rec.command;
            cmd.actorId = rec.actor;
            cmd.args = substitute(step.value("args", nlohmann::json::object()), out.aliases);
            cmd.at = start + static_cast<Timestamp>(1000 * (i + 1));
            try {
                auto res = engine.execute(cmd);
                rec.result = res.result;
                out.collaboration = res.collaboration;
                if (step.contains("as")) {
                    auto id = createdId(res.result);
                    if (!id) throw Error(ErrorCode::ScriptError, "step " + std::to_string(i) + " created nothing to alias");
                    out.aliases[step["as"].get<std::string>()] = *id;
                }
                out.steps.push_back(rec);
                if (!expected.empty())
                    throw Error(ErrorCode::ScriptError,
                                "step " + std::to_string(i) + " (" + rec.command + ") succeeded, expected " + expected);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::ScriptError) throw;
                rec.error = std::string(codeName(e.code()));
                out.steps.push_back(rec);
                if (expected == *rec.error) continue;
                out.status = ScriptStatus::EngineError;
                out.message = "step " + std::to_string(i) + " (" + rec.command + " by " + rec.actor + "): " + e.what();
                return out;
            }
        }
    } catch (const Error& e) {
        out.status = ScriptStatus::ScriptError;
        out.message = e.what();
        return out;
    } catch (const nlohmann::json::exception& e) {
        out.status = ScriptStatus::ScriptError;
        out.message = e.what();
        return out;
    }

    const auto& c = *out.collaboration;
    out.status = c.state == LifecycleState::Closed && c.unresolvedCount() == 0 ? ScriptStatus::Converged
                                                                                : ScriptStatus::Unresolved;
    out.message = std::string(name(c.state)) + ", " + std::to_string(c.unresolvedCount()) + " unresolved";
    return out;
}

}  // namespace gdm
