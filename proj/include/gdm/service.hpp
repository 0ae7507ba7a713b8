#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "gdm/config.hpp"
#include "gdm/engine.hpp"
#include "gdm/error.hpp"

namespace httplib {
class Server;
}

namespace gdm {

// HTTP status for each module error.
int httpStatus(ErrorCode code);

/// JSON-over-HTTP facade. Every mutating request maps to exactly one engine
/// command issued as the authenticated user.
class Service {
public:
    Service(Engine& engine, ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Blocks until stop().
    bool listen();
    // For tests: binds an ephemeral port, returns it; serve with listenAfterBind().
    int bindAnyPort();
    bool listenAfterBind();
    void stop();
    bool running() const;

private:
    struct Stored {
        int status;
        std::string body;
    };

    void routes();
    std::string authenticate(const std::string& authorization) const;
    void notifyStreams();

    Engine& engine_;
    ServiceConfig config_;
    std::unique_ptr<httplib::Server> server_;

    std::mutex idempotencyMutex_;
    std::map<std::pair<std::string, std::string>, Stored> idempotency_;

    std::mutex streamMutex_;
    std::condition_variable streamCv_;
    std::uint64_t streamGeneration_ = 0;
    std::atomic<bool> stopping_{false};
};

}  // namespace gdm
