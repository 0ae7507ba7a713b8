#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "gdm/error.hpp"

namespace gdm::notation {

struct RelationshipDef {
    std::string name;
    bool symmetric = false;
    std::optional<std::string> parent;

    bool operator==(const RelationshipDef&) const = default;
};

struct Endpoint {
    std::string metamodel;
    std::string element;

    bool operator==(const Endpoint&) const = default;
    auto operator<=>(const Endpoint&) const = default;
};

/// `Rel[MM:a <-> MM:b]` (symmetric) or `Rel[MM:a -> MM:b]` (directed).
struct Correspondence {
    std::string relationship;
    Endpoint left;
    Endpoint right;
    bool directed = true;
};

// Symmetric correspondences are equal under a left/right swap.
bool operator==(const Correspondence& a, const Correspondence& b);

/// Token classes reported by syntax errors.
enum class TokenClass { Identifier, LeftBracket, RightBracket, Colon, Arrow, End };
std::string_view name(TokenClass t);

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, TokenClass expected, const std::string& detail)
        : Error(ErrorCode::SyntaxError,
                "at byte " + std::to_string(offset) + ": expected " + std::string(name(expected)) + ", " + detail),
          offset_(offset),
          expected_(expected) {}

    std::size_t offset() const noexcept { return offset_; }
    TokenClass expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    TokenClass expected_;
};

/// Relationship catalogue; preloaded with Similarity (symmetric),
/// Dependency (directed) and Induction (directed, a kind of Dependency).
class RelationshipRegistry {
public:
    RelationshipRegistry();

    // Throws DuplicateName or UnknownParent.
    void add(RelationshipDef def);
    std::optional<RelationshipDef> find(const std::string& name) const;
    std::vector<RelationshipDef> all() const;

    // Ancestors first-to-root, excluding the relationship itself.
    std::vector<std::string> lineage(const std::string& name) const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, RelationshipDef> defs_;
};

// Accepts Unicode (U+2192, U+2194) and ASCII (->, <->) arrows. Throws
// SyntaxError, Error(UnknownRelationship) or Error(ArrowMismatch).
Correspondence parse(std::string_view text, const RelationshipRegistry& registry);

// Canonical form: ASCII arrows with single spaces around them.
std::string render(const Correspondence& c);

// render(parse(text)).
std::string canonicalize(std::string_view text, const RelationshipRegistry& registry);

}  // namespace gdm::notation
