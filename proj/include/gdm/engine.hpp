#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/bus.hpp"
#include "gdm/collaboration.hpp"
#include "gdm/ids.hpp"
#include "gdm/journal.hpp"
#include "gdm/lifecycle.hpp"
#include "gdm/notation.hpp"
#include "gdm/policy.hpp"

namespace gdm {

struct EngineOptions {
    // no journal: state lives in memory only
    std::optional<std::filesystem::path> journalPath;
    ThresholdMapping mapping;
    std::optional<int> maxRounds;
    Clock clock = systemNow;
};

struct CommandOutcome {
    nlohmann::json result;
    std::vector<Event> events;
    Collaboration collaboration;
};

/// Owns every collaboration and serializes commands per collaboration.
///
/// A command runs against a copy of the collaboration. Only when it succeeds
/// is it journaled, its events recorded, and the copy swapped in; a rejected
/// command leaves no trace. On construction with a journal the log is
/// replayed, regenerating the same ids and event sequence numbers.
class Engine {
public:
    explicit Engine(EngineOptions options = {});
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // args: {users: [...], intent?, collaborationId?}. `at` == 0 takes the clock.
    CommandOutcome create(const std::string& actorId, const nlohmann::json& args, Timestamp at = 0);
    // Any lifecycle command; createCollaboration is routed to create().
    CommandOutcome execute(Command cmd);

    Collaboration get(const std::string& collaborationId) const;  // UnknownCollaboration
    std::vector<std::string> collaborationIds() const;
    // collaboration owning a proposal id
    std::optional<std::string> ownerOf(const std::string& proposalId) const;

    void registerPolicy(const DecisionPolicy& policy, Timestamp at = 0);
    void registerRelationship(const notation::RelationshipDef& def, Timestamp at = 0);

    const PolicyRepository& policies() const { return policies_; }
    const notation::RelationshipRegistry& relationships() const { return relationships_; }
    NotificationBus& bus() { return bus_; }
    const EngineOptions& options() const { return options_; }

    // Commands re-executed while opening the journal.
    std::size_t replayedCommands() const { return replayed_; }
    // Byte offset of a corrupt tail that was cut off at startup, if any.
    std::optional<std::uint64_t> truncatedAt() const { return truncatedAt_; }

private:
    struct Slot {
        std::mutex mutex;
        Collaboration collab;
    };

    std::shared_ptr<Slot> slot(const std::string& id) const;
    CommandOutcome createLocked(const Command& cmd);
    CommandOutcome commit(const Command& cmd, Collaboration next, nlohmann::json result,
                          std::vector<EventDraft> drafts);
    void index(const Collaboration& c);
    void replay(const JournalScan& scan);
    CommandContext context(const Command& cmd) const;

    EngineOptions options_;
    PolicyRepository policies_;
    notation::RelationshipRegistry relationships_;
    NotificationBus bus_;
    std::unique_ptr<Journal> journal_;

    mutable std::shared_mutex mapMutex_;
    std::map<std::string, std::shared_ptr<Slot>> slots_;
    std::map<std::string, std::string> proposalOwner_;
    std::uint64_t created_ = 0;
    std::mutex createMutex_;

    bool replaying_ = false;
    // during replay: event seqs already in the journal, per collaboration
    std::map<std::string, std::map<std::uint64_t, nlohmann::json>> loggedEvents_;
    std::size_t replayed_ = 0;
    std::optional<std::uint64_t> truncatedAt_;
};

}  // namespace gdm
