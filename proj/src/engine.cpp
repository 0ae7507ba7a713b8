#include "gdm/engine.hpp"

#include "gdm/error.hpp"

namespace gdm {

Engine::Engine(EngineOptions options) : options_(std::move(options)) {
    if (!options_.clock) options_.clock = systemNow;
    bus_.setAuditHook([this](const nlohmann::json& entry) {
        if (journal_ && !replaying_) journal_->append(RecordType::Audit, entry.value("collaborationId", ""), entry);
    });
    bus_.setAppendHook([this](const Event& e) {
        if (!journal_) return;
        if (!replaying_) {
            journal_->append(RecordType::Event, e.collaborationId, e);
            return;
        }
        auto& logged = loggedEvents_[e.collaborationId];
        auto it = logged.find(e.seq);
        if (it == logged.end()) {
            // the command made it to disk but its events did not
            journal_->append(RecordType::Event, e.collaborationId, e);
            return;
        }
        if (nlohmann::json(e) != it->second)
            throw Error(ErrorCode::CorruptLog, "replayed event " + e.collaborationId + "#" + std::to_string(e.seq) +
                                                   " differs from the logged one");
        logged.erase(it);
    });
    if (options_.journalPath) {
        journal_ = std::make_unique<Journal>(*options_.journalPath);
        truncatedAt_ = journal_->recovered().corruptAt;
        replay(journal_->recovered());
    }
}

Engine::~Engine() = default;

void Engine::replay(const JournalScan& scan) {
    for (const auto& r : scan.records)
        if (r.type == RecordType::Event) loggedEvents_[r.collaborationId][r.payload.at("seq").get<std::uint64_t>()] = r.payload;
    replaying_ = true;
    try {
        for (const auto& r : scan.records) {
            if (r.type != RecordType::Command) continue;
            auto cmd = r.payload.get<Command>();
            if (cmd.name == "registerPolicy") {
                policies_.add(cmd.args.get<DecisionPolicy>());
            } else if (cmd.name == "registerRelationship") {
                notation::RelationshipDef def;
                def.name = cmd.args.at("name").get<std::string>();
                def.symmetric = cmd.args.value("symmetric", false);
                if (auto it = cmd.args.find("parent"); it != cmd.args.end() && !it->is_null())
                    def.parent = it->get<std::string>();
                relationships_.add(def);
            } else {
                execute(cmd);
            }
            ++replayed_;
        }
    } catch (const Error& e) {
        replaying_ = false;
        if (e.code() == ErrorCode::CorruptLog) throw;
        throw Error(ErrorCode::CorruptLog, std::string("replay failed: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        replaying_ = false;
        throw Error(ErrorCode::CorruptLog, std::string("replay failed: ") + e.what());
    }
    replaying_ = false;
    for (const auto& [collab, rest] : loggedEvents_)
        if (!rest.empty())
            throw Error(ErrorCode::CorruptLog, "logged event " + collab + "#" + std::to_string(rest.begin()->first) +
                                                   " was not regenerated by replay");
    loggedEvents_.clear();
}

std::shared_ptr<Engine::Slot> Engine::slot(const std::string& id) const {
    std::shared_lock lock(mapMutex_);
    auto it = slots_.find(id);
    if (it == slots_.end()) throw Error(ErrorCode::UnknownCollaboration, id);
    return it->second;
}

CommandContext Engine::context(const Command& cmd) const {
    CommandContext ctx;
    ctx.actorId = cmd.actorId;
    ctx.at = cmd.at;
    ctx.policies = &policies_;
    ctx.relationships = &relationships_;
    ctx.mapping = options_.mapping;
    ctx.maxRounds = options_.maxRounds;
    return ctx;
}

void Engine::index(const Collaboration& c) {
    {
        std::unique_lock lock(mapMutex_);
        for (const auto& [id, p] : c.proposals.all()) proposalOwner_[id] = c.collaborationId;
    }
    bus_.declareSubject(c.collaborationId, c.collaborationId);
    for (const auto& [id, p] : c.proposals.all())
        if (!bus_.hasSubject(id)) bus_.declareSubject(id, c.collaborationId);
}

CommandOutcome Engine::commit(const Command& cmd, Collaboration next, nlohmann::json result,
                              std::vector<EventDraft> drafts) {
    if (journal_ && !replaying_) journal_->append(RecordType::Command, next.collaborationId, cmd);
    index(next);
    auto events = bus_.record(next.collaborationId, drafts, cmd.at);
    autoRegisterEligible(bus_, next, cmd.at);
    return {std::move(result), std::move(events), std::move(next)};
}

CommandOutcome Engine::create(const std::string& actorId, const nlohmann::json& args, Timestamp at) {
    Command cmd;
    cmd.name = "createCollaboration";
    cmd.actorId = actorId;
    cmd.args = args;
    cmd.at = at;
    return execute(std::move(cmd));
}

CommandOutcome Engine::createLocked(const Command& cmd) {
    std::lock_guard createLock(createMutex_);
    ++created_;
    Command logged = cmd;
    std::string id = cmd.args.value("collaborationId", "");
    if (id.empty()) id = makeSortableId(cmd.at, "collaboration", created_);
    logged.collaborationId = id;
    logged.args["collaborationId"] = id;
    {
        std::shared_lock lock(mapMutex_);
        if (slots_.count(id)) throw Error(ErrorCode::BadRequest, "collaboration " + id + " already exists");
    }
    std::vector<InvolvedUser> users;
    try {
        users = cmd.args.at("users").get<std::vector<InvolvedUser>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadRequest, e.what());
    }
    auto c = createCollaboration(id, cmd.actorId, std::move(users), cmd.args.value("intent", ""), cmd.at);
    auto fresh = std::make_shared<Slot>();
    std::lock_guard slotLock(fresh->mutex);
    auto out = commit(logged, c, {{"collaborationId", id}, {"state", c.state}}, {});
    fresh->collab = out.collaboration;
    std::unique_lock lock(mapMutex_);
    slots_.emplace(id, std::move(fresh));
    return out;
}

CommandOutcome Engine::execute(Command cmd) {
    if (cmd.at == 0) cmd.at = options_.clock();
    if (cmd.name == "createCollaboration") return createLocked(cmd);
    if (cmd.name == "registerPolicy" || cmd.name == "registerRelationship")
        throw Error(ErrorCode::BadRequest, cmd.name + " is not a collaboration command");
    auto s = slot(cmd.collaborationId);
    CommandOutcome out;
    {
        std::lock_guard lock(s->mutex);
        auto next = s->collab;
        auto ctx = context(cmd);
        auto result = apply(next, ctx, cmd);
        out = commit(cmd, std::move(next), std::move(result), std::move(ctx.events));
        s->collab = out.collaboration;
    }
    bus_.deliverPending(cmd.collaborationId);
    return out;
}

Collaboration Engine::get(const std::string& collaborationId) const {
    auto s = slot(collaborationId);
    std::lock_guard lock(s->mutex);
    return s->collab;
}

std::vector<std::string> Engine::collaborationIds() const {
    std::shared_lock lock(mapMutex_);
    std::vector<std::string> ids;
    for (const auto& [id, s] : slots_) ids.push_back(id);
    return ids;
}

std::optional<std::string> Engine::ownerOf(const std::string& proposalId) const {
    std::shared_lock lock(mapMutex_);
    if (auto it = proposalOwner_.find(proposalId); it != proposalOwner_.end()) return it->second;
    return std::nullopt;
}

void Engine::registerPolicy(const DecisionPolicy& policy, Timestamp at) {
    policies_.add(policy);
    if (journal_)
        journal_->append(RecordType::Command, "",
                         Command{"", "registerPolicy", "", policy, at ? at : options_.clock()});
}

void Engine::registerRelationship(const notation::RelationshipDef& def, Timestamp at) {
    relationships_.add(def);
    nlohmann::json args = {{"name", def.name}, {"symmetric", def.symmetric}};
    if (def.parent) args["parent"] = *def.parent;
    if (journal_) journal_->append(RecordType::Command, "", Command{"", "registerRelationship", "", args, at ? at : options_.clock()});
}

}  // namespace gdm
