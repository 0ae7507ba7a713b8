#include "gdm/bus.hpp"

#include <memory>

#include "gdm/collaboration.hpp"
#include "gdm/error.hpp"

namespace gdm {

namespace {

constexpr std::size_t kMailboxCapacity = 4096;

}  // namespace

std::string_view name(EventKind kind) {
    switch (kind) {
        case EventKind::ActorAssigned: return "ActorAssigned";
        case EventKind::ProposalCreated: return "ProposalCreated";
        case EventKind::AlternativeProposed: return "AlternativeProposed";
        case EventKind::EvaluationRequested: return "EvaluationRequested";
        case EventKind::DecisionRecorded: return "DecisionRecorded";
        case EventKind::RoundClosed: return "RoundClosed";
        case EventKind::ThresholdMissed: return "ThresholdMissed";
        case EventKind::ThresholdAdjusted: return "ThresholdAdjusted";
        case EventKind::CollectiveDecisionPublished: return "CollectiveDecisionPublished";
        case EventKind::CollaborationClosed: return "CollaborationClosed";
    }
    return "?";
}

EventKind parseEventKind(std::string_view text) {
    for (int k = 0; k <= static_cast<int>(EventKind::CollaborationClosed); ++k)
        if (name(static_cast<EventKind>(k)) == text) return static_cast<EventKind>(k);
    throw Error(ErrorCode::BadRequest, "unknown event kind '" + std::string(text) + "'");
}

void to_json(nlohmann::json& j, const Event& e) {
    j = {{"seq", e.seq},
         {"collaborationId", e.collaborationId},
         {"kind", std::string(name(e.kind))},
         {"payload", e.payload},
         {"at", e.at}};
}

void from_json(const nlohmann::json& j, Event& e) {
    e.seq = j.at("seq").get<std::uint64_t>();
    e.collaborationId = j.at("collaborationId").get<std::string>();
    e.kind = parseEventKind(j.at("kind").get<std::string>());
    e.payload = j.at("payload");
    e.at = j.at("at").get<Timestamp>();
}

void NotificationBus::setAppendHook(AppendHook hook) {
    std::lock_guard lock(mutex_);
    appendHook_ = std::move(hook);
}

void NotificationBus::setAuditHook(AuditHook hook) {
    std::lock_guard lock(mutex_);
    auditHook_ = std::move(hook);
}

void NotificationBus::declareSubject(const std::string& subjectId, const std::string& collaborationId) {
    std::lock_guard lock(mutex_);
    subjectOwner_[subjectId] = collaborationId;
}

bool NotificationBus::hasSubject(const std::string& subjectId) const {
    std::lock_guard lock(mutex_);
    return subjectOwner_.count(subjectId) != 0;
}

Subscription NotificationBus::subscribe(const std::string& observerId, const std::string& subjectId, Timestamp at) {
    std::lock_guard lock(mutex_);
    if (!subjectOwner_.count(subjectId)) throw Error(ErrorCode::UnknownSubject, subjectId);
    auto& subs = bySubject_[subjectId];
    auto [it, inserted] = subs.try_emplace(observerId, Subscription{observerId, subjectId, at});
    return it->second;
}

void NotificationBus::unsubscribe(const std::string& observerId, const std::string& subjectId) {
    std::lock_guard lock(mutex_);
    if (auto it = bySubject_.find(subjectId); it != bySubject_.end()) it->second.erase(observerId);
}

std::vector<Subscription> NotificationBus::subscriptions(const std::string& observerId) const {
    std::lock_guard lock(mutex_);
    std::vector<Subscription> out;
    for (const auto& [subject, subs] : bySubject_)
        if (auto it = subs.find(observerId); it != subs.end()) out.push_back(it->second);
    return out;
}

void NotificationBus::attach(const std::string& observerId, Sink sink) {
    std::lock_guard lock(mutex_);
    sinks_[observerId] = std::make_shared<Sink>(std::move(sink));
}

void NotificationBus::detach(const std::string& observerId) {
    std::lock_guard lock(mutex_);
    sinks_.erase(observerId);
}

std::vector<Event> NotificationBus::record(const std::string& collaborationId, const std::vector<EventDraft>& drafts,
                                           Timestamp at) {
    std::lock_guard lock(mutex_);
    subjectOwner_.try_emplace(collaborationId, collaborationId);
    auto& ch = channels_[collaborationId];
    std::vector<Event> out;
    for (const auto& d : drafts) {
        Event e{ch.log.size() + 1, collaborationId, d.kind, d.payload, at};
        if (appendHook_) appendHook_(e);
        ch.log.push_back(e);
        ch.queue.push_back({e, d.subjects, d.recipient});
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<std::string> NotificationBus::recipientsOf(const Pending& p) const {
    std::set<std::string> observers;
    auto addSubject = [&](const std::string& subject) {
        if (auto it = bySubject_.find(subject); it != bySubject_.end())
            for (const auto& [observer, sub] : it->second) observers.insert(observer);
    };
    addSubject(p.event.collaborationId);
    for (const auto& s : p.subjects) addSubject(s);
    if (p.recipient) observers.insert(*p.recipient);
    return {observers.begin(), observers.end()};
}

bool NotificationBus::deliverTo(const std::string& observerId, const Event& e) {
    std::shared_ptr<Sink> sink;
    {
        std::lock_guard lock(mutex_);
        auto it = sinks_.find(observerId);
        if (it == sinks_.end()) {
            auto& box = mailboxes_[observerId];
            if (box.size() >= kMailboxCapacity) box.erase(box.begin());
            box.push_back(e);
            return true;
        }
        sink = it->second;
    }
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        try {
            if ((*sink)(e)) return true;
        } catch (...) {
        }
    }
    return false;
}

void NotificationBus::deliverPending(const std::string& collaborationId) {
    std::unique_lock lock(mutex_);
    auto& ch = channels_[collaborationId];
    if (ch.draining) return;
    ch.draining = true;
    while (!ch.queue.empty()) {
        auto pending = std::move(ch.queue.front());
        ch.queue.pop_front();
        auto observers = recipientsOf(pending);
        lock.unlock();
        std::vector<std::string> failed;
        for (const auto& o : observers)
            if (!deliverTo(o, pending.event)) failed.push_back(o);
        lock.lock();
        for (const auto& o : failed) {
            sinks_.erase(o);
            for (auto& [subject, subs] : bySubject_) subs.erase(o);
            nlohmann::json entry = {{"kind", "ObserverDropped"},
                                    {"observerId", o},
                                    {"collaborationId", collaborationId},
                                    {"seq", pending.event.seq},
                                    {"attempts", kMaxAttempts}};
            audit_.push_back(entry);
            if (auditHook_) auditHook_(entry);
        }
    }
    ch.draining = false;
}

Event NotificationBus::publish(const std::string& collaborationId, const EventDraft& draft, Timestamp at) {
    auto events = record(collaborationId, {draft}, at);
    deliverPending(collaborationId);
    return events.front();
}

std::vector<Event> NotificationBus::events(const std::string& collaborationId, std::uint64_t fromSeq) const {
    std::lock_guard lock(mutex_);
    auto it = channels_.find(collaborationId);
    if (it == channels_.end()) return {};
    const auto& log = it->second.log;
    if (fromSeq == 0) fromSeq = 1;
    if (fromSeq > log.size()) return {};
    return {log.begin() + static_cast<std::ptrdiff_t>(fromSeq - 1), log.end()};
}

std::uint64_t NotificationBus::lastSeq(const std::string& collaborationId) const {
    std::lock_guard lock(mutex_);
    auto it = channels_.find(collaborationId);
    return it == channels_.end() ? 0 : it->second.log.size();
}

std::vector<Event> NotificationBus::drainMailbox(const std::string& observerId) {
    std::lock_guard lock(mutex_);
    auto it = mailboxes_.find(observerId);
    if (it == mailboxes_.end()) return {};
    auto out = std::move(it->second);
    mailboxes_.erase(it);
    return out;
}

std::vector<nlohmann::json> NotificationBus::auditTrail() const {
    std::lock_guard lock(mutex_);
    return audit_;
}

std::vector<Subscription> autoRegisterEligible(NotificationBus& bus, const Collaboration& collab, Timestamp at) {
    std::vector<Subscription> out;
    switch (collab.state) {
        case LifecycleState::Draft:
        case LifecycleState::Configured:
        case LifecycleState::MethodChosen: return out;
        default: break;
    }
    for (const auto& [id, p] : collab.proposals.all()) {
        if (!p.isLeaf() || p.withdrawn || p.collectiveDecision != CollectiveStatus::Pending) continue;
        if (!bus.hasSubject(id)) bus.declareSubject(id, collab.collaborationId);
        for (const auto& dm : collab.eligibleDMs) out.push_back(bus.subscribe(dm, id, at));
    }
    return out;
}

}  // namespace gdm
