#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/event.hpp"

namespace gdm {

struct Collaboration;

struct Subscription {
    std::string observerId;
    std::string subjectId;
    Timestamp createdAt = 0;

    bool operator==(const Subscription&) const = default;
};

/// Observer registry and ordered event fan-out.
///
/// Events are appended to the per-collaboration log (and handed to the
/// durability hook) before any observer sees them. Delivery runs outside the
/// registry lock; one drainer per collaboration keeps seq order even when
/// several threads publish. Observers without an attached sink accumulate
/// events in a mailbox. A sink that fails `kMaxAttempts` times in a row on one
/// event is dropped with its subscriptions and an audit entry is written.
class NotificationBus {
public:
    // Returns true when the event was accepted.
    using Sink = std::function<bool(const Event&)>;
    using AppendHook = std::function<void(const Event&)>;
    using AuditHook = std::function<void(const nlohmann::json&)>;

    static constexpr int kMaxAttempts = 3;

    void setAppendHook(AppendHook hook);
    void setAuditHook(AuditHook hook);

    // Subjects are collaborations (owner == id) and proposals (owner == the
    // collaboration they belong to).
    void declareSubject(const std::string& subjectId, const std::string& collaborationId);
    bool hasSubject(const std::string& subjectId) const;

    // Idempotent; UnknownSubject when the subject was never declared.
    Subscription subscribe(const std::string& observerId, const std::string& subjectId, Timestamp at = 0);
    void unsubscribe(const std::string& observerId, const std::string& subjectId);
    std::vector<Subscription> subscriptions(const std::string& observerId) const;

    void attach(const std::string& observerId, Sink sink);
    void detach(const std::string& observerId);

    // Assigns seqs and appends to the log; nothing is delivered yet.
    std::vector<Event> record(const std::string& collaborationId, const std::vector<EventDraft>& drafts, Timestamp at);
    // Delivers everything recorded so far for the collaboration, in seq order.
    void deliverPending(const std::string& collaborationId);
    // record + deliverPending for a single draft.
    Event publish(const std::string& collaborationId, const EventDraft& draft, Timestamp at);

    std::vector<Event> events(const std::string& collaborationId, std::uint64_t fromSeq = 1) const;
    std::uint64_t lastSeq(const std::string& collaborationId) const;
    std::vector<Event> drainMailbox(const std::string& observerId);
    std::vector<nlohmann::json> auditTrail() const;

private:
    struct Pending {
        Event event;
        std::vector<std::string> subjects;
        std::optional<std::string> recipient;
    };
    struct Channel {
        std::vector<Event> log;
        std::deque<Pending> queue;
        bool draining = false;
    };

    std::vector<std::string> recipientsOf(const Pending& p) const;
    bool deliverTo(const std::string& observerId, const Event& e);

    mutable std::mutex mutex_;
    std::map<std::string, std::string> subjectOwner_;
    std::map<std::string, std::map<std::string, Subscription>> bySubject_;  // subject -> observer -> sub
    std::map<std::string, std::shared_ptr<Sink>> sinks_;
    std::map<std::string, std::vector<Event>> mailboxes_;
    std::map<std::string, Channel> channels_;
    std::vector<nlohmann::json> audit_;
    AppendHook appendHook_;
    AuditHook auditHook_;
};

// Registers every eligible decision maker on every pending leaf proposal of
// the collaboration. Safe to re-run.
std::vector<Subscription> autoRegisterEligible(NotificationBus& bus, const Collaboration& collab, Timestamp at = 0);

}  // namespace gdm
