#include "gdm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gdm/error.hpp"

namespace gdm {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Strips a trailing comment that is not inside a quoted string.
std::string stripComment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& v, int lineNo) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": expected a quoted string");
}

std::string scalar(const std::string& v) {
    return v.size() >= 2 && v.front() == '"' && v.back() == '"' ? v.substr(1, v.size() - 2) : v;
}

int integer(const std::string& v, int lineNo) {
    try {
        std::size_t used = 0;
        int n = std::stoi(v, &used);
        if (used == v.size()) return n;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": expected an integer");
}

}  // namespace

ServiceConfig parseConfig(std::string_view text) {
    ServiceConfig cfg;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        auto line = trim(stripComment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": unterminated table");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "thresholds" && section != "tokens")
                throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": unknown table " + section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": expected key = value");
        auto key = scalar(trim(std::string_view(line).substr(0, eq)));
        auto value = trim(std::string_view(line).substr(eq + 1));

        if (section.empty()) {
            if (key == "port") cfg.port = integer(value, lineNo);
            else if (key == "host") cfg.host = unquote(value, lineNo);
            else if (key == "log") cfg.log = unquote(value, lineNo);
            else if (key == "max_rounds") cfg.maxRounds = integer(value, lineNo);
            else throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": unknown key " + key);
        } else if (section == "thresholds") {
            auto f = parseFraction(scalar(value));
            if (f <= 0 || f > 1)
                throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": threshold outside (0, 1]");
            if (key == "low") cfg.thresholds.low = f;
            else if (key == "medium") cfg.thresholds.medium = f;
            else if (key == "high") cfg.thresholds.high = f;
            else throw Error(ErrorCode::BadRequest, "config line " + std::to_string(lineNo) + ": unknown threshold " + key);
        } else {
            cfg.tokens[key] = unquote(value, lineNo);
        }
    }
    if (cfg.maxRounds && *cfg.maxRounds < 1) throw Error(ErrorCode::BadRequest, "max_rounds must be positive");
    if (!(cfg.thresholds.low <= cfg.thresholds.medium && cfg.thresholds.medium <= cfg.thresholds.high))
        throw Error(ErrorCode::BadRequest, "thresholds must satisfy low <= medium <= high");
    return cfg;
}

ServiceConfig loadConfig(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadRequest, "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parseConfig(ss.str());
}

ServiceConfig configFromEnvironment() {
    if (const char* p = std::getenv("GDM_CONFIG"); p && *p) return loadConfig(p);
    return {};
}

}  // namespace gdm
