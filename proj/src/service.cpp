#include "gdm/service.hpp"

#include <chrono>
#include <functional>

#include <httplib.h>

#include "gdm/summary.hpp"

namespace gdm {

namespace {

constexpr const char* kJson = "application/json";

nlohmann::json parseBody(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    try {
        auto j = nlohmann::json::parse(req.body);
        if (!j.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::BadRequest, e.what());
    }
}

void sendJson(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

nlohmann::json errorBody(ErrorCode code, const std::string& detail) {
    return {{"code", codeName(code)}, {"detail", detail}};
}

}  // namespace

int httpStatus(ErrorCode code) {
    switch (code) {
        case ErrorCode::WrongState:
        case ErrorCode::QuorumNotReached:
        case ErrorCode::SecondReevaluation:
        case ErrorCode::EmptyRound:
        case ErrorCode::DuplicatePolicy:
        case ErrorCode::DuplicateName: return 409;
        case ErrorCode::NotModerator:
        case ErrorCode::NotEligible: return 403;
        case ErrorCode::UnknownProposal:
        case ErrorCode::UnknownPolicy:
        case ErrorCode::UnknownCollaboration:
        case ErrorCode::UnknownActor:
        case ErrorCode::UnknownSubject: return 404;
        case ErrorCode::Unauthorized: return 401;
        case ErrorCode::BadRequest: return 400;
        case ErrorCode::CorruptLog: return 500;
        case ErrorCode::MissingComment:
        case ErrorCode::MissingAlternative:
        case ErrorCode::RatingModeMismatch:
        case ErrorCode::SelfConflict:
        case ErrorCode::CycleDetected:
        case ErrorCode::InvalidProposal:
        case ErrorCode::InvalidMembership:
        case ErrorCode::InvalidPolicy:
        case ErrorCode::NoEligibleActors:
        case ErrorCode::InvalidThreshold:
        case ErrorCode::SyntaxError:
        case ErrorCode::UnknownRelationship:
        case ErrorCode::ArrowMismatch:
        case ErrorCode::UnknownParent:
        case ErrorCode::ScriptError: return 422;
    }
    return 500;
}

Service::Service(Engine& engine, ServiceConfig config)
    : engine_(engine), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    routes();
}

Service::~Service() { stop(); }

std::string Service::authenticate(const std::string& authorization) const {
    constexpr std::string_view prefix = "Bearer ";
    if (!authorization.starts_with(prefix)) throw Error(ErrorCode::Unauthorized, "missing bearer token");
    auto it = config_.tokens.find(authorization.substr(prefix.size()));
    if (it == config_.tokens.end()) throw Error(ErrorCode::Unauthorized, "unknown token");
    return it->second;
}

void Service::notifyStreams() {
    {
        std::lock_guard lock(streamMutex_);
        ++streamGeneration_;
    }
    streamCv_.notify_all();
}

void Service::routes() {
    using httplib::Request;
    using httplib::Response;
    using Body = std::pair<int, nlohmann::json>;
    using Handler = std::function<Body(const Request&, const std::string& user)>;

    auto guarded = [](std::function<void(const Request&, Response&)> fn) {
        return [fn](const Request& req, Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                sendJson(res, httpStatus(e.code()), errorBody(e.code(), e.detail()));
            } catch (const nlohmann::json::exception& e) {
                sendJson(res, 400, errorBody(ErrorCode::BadRequest, e.what()));
            } catch (const std::exception& e) {
                sendJson(res, 500, {{"code", "Internal"}, {"detail", e.what()}});
            }
        };
    };

    auto mutating = [this](Handler h) {
        return [this, h](const Request& req, Response& res) {
            Body out{500, nullptr};
            std::string user;
            try {
                user = authenticate(req.get_header_value("Authorization"));
            } catch (const Error& e) {
                sendJson(res, 401, errorBody(e.code(), e.detail()));
                return;
            }
            const auto key = req.get_header_value("Idempotency-Key");
            std::unique_lock<std::mutex> keyed;
            if (!key.empty()) {
                keyed = std::unique_lock(idempotencyMutex_);
                if (auto it = idempotency_.find({user, key}); it != idempotency_.end()) {
                    res.status = it->second.status;
                    res.set_header("Idempotent-Replay", "true");
                    res.set_content(it->second.body, kJson);
                    return;
                }
            }
            try {
                out = h(req, user);
            } catch (const Error& e) {
                out = {httpStatus(e.code()), errorBody(e.code(), e.detail())};
            } catch (const nlohmann::json::exception& e) {
                out = {400, errorBody(ErrorCode::BadRequest, e.what())};
            }
            const auto text = out.second.dump();
            if (!key.empty()) idempotency_[{user, key}] = {out.first, text};
            res.status = out.first;
            res.set_content(text, kJson);
            if (out.first < 300) notifyStreams();
        };
    };

    auto command = [this](const std::string& collab, const std::string& name, const std::string& user,
                          nlohmann::json args) {
        Command cmd{collab, name, user, std::move(args), 0};
        auto out = engine_.execute(cmd);
        auto body = out.result;
        body["collaborationId"] = out.collaboration.collaborationId;
        auto seqs = nlohmann::json::array();
        for (const auto& e : out.events) seqs.push_back(e.seq);
        body["eventSeqs"] = seqs;
        return body;
    };

    auto owner = [this](const std::string& proposalId) {
        auto id = engine_.ownerOf(proposalId);
        if (!id) throw Error(ErrorCode::UnknownProposal, proposalId);
        return *id;
    };

    auto& s = *server_;

    s.Post("/collaborations", mutating([this](const Request& req, const std::string& user) -> Body {
        auto out = engine_.create(user, parseBody(req));
        return {201, {{"collaborationId", out.collaboration.collaborationId}, {"state", out.collaboration.state}}};
    }));

    auto simple = [&](const std::string& suffix, const std::string& name) {
        s.Post("/collaborations/:id/" + suffix, mutating([=](const Request& req, const std::string& user) -> Body {
            return {200, command(req.path_params.at("id"), name, user, parseBody(req))};
        }));
    };
    simple("situation", "defineSituation");
    simple("policy", "chooseMethod");
    simple("notify", "notifyActors");
    simple("rounds/open", "openEvaluation");
    simple("rounds/close", "closeRound");
    simple("moderator-choice", "moderatorChoice");
    simple("adjustments", "adjustProposals");
    simple("users", "addUser");

    s.Post("/collaborations/:id/proposals", mutating([=](const Request& req, const std::string& user) -> Body {
        return {201, command(req.path_params.at("id"), "addProposal", user, parseBody(req))};
    }));

    s.Post("/proposals/:id/alternatives", mutating([=](const Request& req, const std::string& user) -> Body {
        const auto pid = req.path_params.at("id");
        auto args = parseBody(req);
        args["kind"] = "alternative";
        args["refines"] = pid;
        return {201, command(owner(pid), "addProposal", user, args)};
    }));

    s.Post("/proposals/:id/conflicts", mutating([=](const Request& req, const std::string& user) -> Body {
        const auto pid = req.path_params.at("id");
        auto args = parseBody(req);
        args["proposalId"] = pid;
        return {200, command(owner(pid), "addConflict", user, args)};
    }));

    s.Post("/proposals/:id/decisions", mutating([=](const Request& req, const std::string& user) -> Body {
        const auto pid = req.path_params.at("id");
        auto args = parseBody(req);
        args["proposalId"] = pid;
        return {201, command(owner(pid), "submitDecision", user, args)};
    }));

    s.Get("/policies", guarded([this](const Request&, Response& res) {
        auto out = nlohmann::json::array();
        for (const auto& n : engine_.policies().names()) out.push_back(engine_.policies().get(n));
        sendJson(res, 200, out);
    }));

    s.Get("/policies/:name", guarded([this](const Request& req, Response& res) {
        auto p = engine_.policies().get(req.path_params.at("name"));
        nlohmann::json body = p;
        body["manual"] = renderManual(p);
        sendJson(res, 200, body);
    }));

    s.Get("/collaborations", guarded([this](const Request& req, Response& res) {
        authenticate(req.get_header_value("Authorization"));
        sendJson(res, 200, engine_.collaborationIds());
    }));

    s.Get("/collaborations/:id", guarded([this](const Request& req, Response& res) {
        authenticate(req.get_header_value("Authorization"));
        sendJson(res, 200, engine_.get(req.path_params.at("id")));
    }));

    s.Get("/collaborations/:id/summary", guarded([this](const Request& req, Response& res) {
        authenticate(req.get_header_value("Authorization"));
        auto c = engine_.get(req.path_params.at("id"));
        const auto format = req.has_param("format") ? req.get_param_value("format") : "json";
        const auto& mapping = engine_.options().mapping;
        if (format == "csv") {
            res.set_content(summaryCsv(c, mapping), "text/csv");
        } else if (format == "md") {
            res.set_content(summaryMarkdown(c, mapping), "text/markdown");
        } else if (format == "json") {
            sendJson(res, 200, summaryJson(c, mapping));
        } else {
            throw Error(ErrorCode::BadRequest, "format must be json, csv or md");
        }
    }));

    s.Get("/collaborations/:id/events", guarded([this](const Request& req, Response& res) {
        authenticate(req.get_header_value("Authorization"));
        const auto id = req.path_params.at("id");
        engine_.get(id);
        std::uint64_t from = 1;
        try {
            if (req.has_param("from")) from = std::stoull(req.get_param_value("from"));
            else if (req.has_header("Last-Event-ID")) from = std::stoull(req.get_header_value("Last-Event-ID")) + 1;
        } catch (const std::exception&) {
            throw Error(ErrorCode::BadRequest, "from must be a sequence number");
        }
        auto next = std::make_shared<std::uint64_t>(std::max<std::uint64_t>(from, 1));
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [this, id, next](std::size_t, httplib::DataSink& sink) {
            if (stopping_) return false;
            std::uint64_t generation;
            {
                std::lock_guard lock(streamMutex_);
                generation = streamGeneration_;
            }
            auto events = engine_.bus().events(id, *next);
            if (events.empty()) {
                std::unique_lock lock(streamMutex_);
                const bool woken = streamCv_.wait_for(lock, std::chrono::seconds(1), [&] {
                    return stopping_ || streamGeneration_ != generation;
                });
                if (stopping_) return false;
                if (!woken) {
                    static constexpr std::string_view ping = ": keepalive\n\n";
                    return sink.write(ping.data(), ping.size());
                }
                return true;
            }
            for (const auto& e : events) {
                std::string frame = "id: " + std::to_string(e.seq) + "\nevent: " + std::string(name(e.kind)) +
                                    "\ndata: " + nlohmann::json(e).dump() + "\n\n";
                if (!sink.write(frame.data(), frame.size())) return false;
                *next = e.seq + 1;
            }
            return true;
        });
    }));
}

bool Service::listen() { return server_->listen(config_.host, config_.port); }

int Service::bindAnyPort() { return server_->bind_to_any_port(config_.host); }

bool Service::listenAfterBind() { return server_->listen_after_bind(); }

void Service::stop() {
    stopping_ = true;
    streamCv_.notify_all();
    if (server_) server_->stop();
}

bool Service::running() const { return server_->is_running(); }

}  // namespace gdm
