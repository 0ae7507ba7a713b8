#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gdm/config.hpp"
#include "gdm/engine.hpp"
#include "gdm/notation.hpp"
#include "gdm/script.hpp"
#include "gdm/service.hpp"
#include "gdm/summary.hpp"

namespace {

gdm::Service* activeService = nullptr;

void onSignal(int) {
    if (activeService) activeService->stop();
}

std::string render(const gdm::Collaboration& c, const std::string& format, const gdm::ThresholdMapping& mapping) {
    if (format == "csv") return gdm::summaryCsv(c, mapping);
    if (format == "md") return gdm::summaryMarkdown(c, mapping);
    return gdm::summaryJson(c, mapping).dump(2) + "\n";
}

gdm::ServiceConfig readConfig(const std::string& path) {
    return path.empty() ? gdm::configFromEnvironment() : gdm::loadConfig(path);
}

gdm::EngineOptions engineOptions(const gdm::ServiceConfig& cfg) {
    gdm::EngineOptions opts;
    opts.journalPath = cfg.log;
    opts.mapping = cfg.thresholds;
    opts.maxRounds = cfg.maxRounds;
    return opts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group decision-making engine"};
    app.require_subcommand(1);

    std::string configPath;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--config", configPath, "Config file (defaults to $GDM_CONFIG)");

    std::string scriptPath;
    std::string format = "json";
    std::string logPath;
    auto* run = app.add_subcommand("run", "Execute a session script against an embedded engine");
    run->add_option("script", scriptPath, "Session script (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--format", format, "Summary format")->check(CLI::IsMember({"json", "csv", "md"}));
    run->add_option("--log", logPath, "Also journal the run to this file");
    run->add_option("--config", configPath, "Config file for threshold mapping and round limit");

    auto* policies = app.add_subcommand("policies", "Inspect the policy repository");
    policies->require_subcommand(1);
    auto* list = policies->add_subcommand("list", "List policy names");
    std::string policyName;
    auto* describe = policies->add_subcommand("describe", "Print a policy's manual entry");
    describe->add_option("name", policyName)->required();
    bool asJson = false;
    describe->add_flag("--json", asJson, "Print the full policy as JSON");

    std::string collabId;
    auto* summary = app.add_subcommand("summary", "Export a collaboration summary from a journal");
    summary->add_option("collaborationId", collabId)->required();
    summary->add_option("--log", logPath, "Journal file")->required()->check(CLI::ExistingFile);
    summary->add_option("--format", format, "Summary format")->check(CLI::IsMember({"json", "csv", "md"}));

    std::string expression;
    auto* parse = app.add_subcommand("parse", "Validate a correspondence expression");
    parse->add_option("expression", expression)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) {
            auto cfg = readConfig(configPath);
            gdm::Engine engine(engineOptions(cfg));
            gdm::Service service(engine, cfg);
            activeService = &service;
            std::signal(SIGINT, onSignal);
            std::signal(SIGTERM, onSignal);
            std::cerr << "listening on " << cfg.host << ":" << cfg.port << "\n";
            if (!service.listen()) {
                std::cerr << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
                return 1;
            }
            activeService = nullptr;
            return 0;
        }

        if (*run) {
            gdm::ServiceConfig cfg = configPath.empty() ? gdm::ServiceConfig{} : gdm::loadConfig(configPath);
            auto opts = engineOptions(cfg);
            opts.journalPath = logPath.empty() ? std::nullopt : std::optional<std::filesystem::path>(logPath);
            gdm::Engine engine(opts);
            nlohmann::json script;
            try {
                std::ifstream in(scriptPath);
                script = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                std::cerr << "script error: " << e.what() << "\n";
                return static_cast<int>(gdm::ScriptStatus::ScriptError);
            }
            auto result = gdm::runScript(engine, script);
            if (result.status == gdm::ScriptStatus::ScriptError || result.status == gdm::ScriptStatus::EngineError) {
                std::cerr << (result.status == gdm::ScriptStatus::ScriptError ? "script error: " : "engine error: ")
                          << result.message << "\n";
                return static_cast<int>(result.status);
            }
            std::cout << render(*result.collaboration, format, opts.mapping);
            std::cerr << result.message << "\n";
            return static_cast<int>(result.status);
        }

        if (*policies) {
            gdm::PolicyRepository repo;
            if (*list) {
                for (const auto& n : repo.names()) std::cout << n << "\n";
            } else if (asJson) {
                std::cout << nlohmann::json(repo.get(policyName)).dump(2) << "\n";
            } else {
                std::cout << gdm::renderManual(repo.get(policyName));
            }
            return 0;
        }

        if (*summary) {
            gdm::EngineOptions opts;
            opts.journalPath = logPath;
            gdm::Engine engine(opts);
            std::cout << render(engine.get(collabId), format, opts.mapping);
            return 0;
        }

        if (*parse) {
            gdm::notation::RelationshipRegistry registry;
            std::cout << gdm::notation::canonicalize(expression, registry) << "\n";
            return 0;
        }
    } catch (const gdm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == gdm::ErrorCode::ScriptError ? 3 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
