#include "gdm/notation.hpp"

#include <cctype>
#include <mutex>
#include <set>

namespace gdm::notation {

namespace {

constexpr std::string_view kRightArrow = "\xE2\x86\x92";  // U+2192
constexpr std::string_view kBothArrow = "\xE2\x86\x94";   // U+2194

enum class Tok { Identifier, LeftBracket, RightBracket, Colon, Arrow, BiArrow, End };

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const auto start = pos_;
        if (pos_ >= src_.size()) return {Tok::End, {}, start};
        const char c = src_[pos_];
        auto rest = src_.substr(pos_);
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            return {Tok::Identifier, src_.substr(start, pos_ - start), start};
        }
        auto single = [&](Tok t) {
            ++pos_;
            return Token{t, src_.substr(start, 1), start};
        };
        switch (c) {
            case '[': return single(Tok::LeftBracket);
            case ']': return single(Tok::RightBracket);
            case ':': return single(Tok::Colon);
            default: break;
        }
        auto take = [&](std::string_view lexeme, Tok t) {
            pos_ += lexeme.size();
            return Token{t, src_.substr(start, lexeme.size()), start};
        };
        if (rest.starts_with("<->")) return take("<->", Tok::BiArrow);
        if (rest.starts_with("->")) return take("->", Tok::Arrow);
        if (rest.starts_with(kRightArrow)) return take(kRightArrow, Tok::Arrow);
        if (rest.starts_with(kBothArrow)) return take(kBothArrow, Tok::BiArrow);
        // an unrecognised byte: report it as a one-byte token of no class
        ++pos_;
        return {Tok::End, src_.substr(start, 1), start};
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(std::string_view src, const RelationshipRegistry& registry) : lexer_(src), registry_(registry) {
        advance();
    }

    Correspondence parse() {
        Correspondence c;
        const auto relToken = expect(Tok::Identifier, TokenClass::Identifier);
        c.relationship = std::string(relToken.text);
        expect(Tok::LeftBracket, TokenClass::LeftBracket);
        c.left = endpoint();
        if (cur_.kind != Tok::Arrow && cur_.kind != Tok::BiArrow) fail(TokenClass::Arrow);
        const auto arrow = cur_;
        advance();
        const auto rightStart = cur_.offset;
        c.right = endpoint();
        expect(Tok::RightBracket, TokenClass::RightBracket);
        if (cur_.kind != Tok::End || !cur_.text.empty()) fail(TokenClass::End);

        auto def = registry_.find(c.relationship);
        if (!def) throw Error(ErrorCode::UnknownRelationship, c.relationship);
        const bool symmetricArrow = arrow.kind == Tok::BiArrow;
        if (symmetricArrow != def->symmetric)
            throw Error(ErrorCode::ArrowMismatch,
                        c.relationship + (def->symmetric ? " is symmetric and needs <->" : " is directed and needs ->") +
                            " (byte " + std::to_string(arrow.offset) + ")");
        c.directed = !def->symmetric;
        if (c.left == c.right)
            throw SyntaxError(rightStart, TokenClass::Identifier, "an element distinct from the left side");
        return c;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(TokenClass expected) {
        std::string found = cur_.kind == Tok::End && cur_.text.empty() ? "end of input"
                                                                        : "'" + std::string(cur_.text) + "'";
        throw SyntaxError(cur_.offset, expected, "found " + found);
    }

    Token expect(Tok kind, TokenClass cls) {
        if (cur_.kind != kind) fail(cls);
        auto t = cur_;
        advance();
        return t;
    }

    Endpoint endpoint() {
        Endpoint e;
        e.metamodel = std::string(expect(Tok::Identifier, TokenClass::Identifier).text);
        expect(Tok::Colon, TokenClass::Colon);
        e.element = std::string(expect(Tok::Identifier, TokenClass::Identifier).text);
        return e;
    }

    Lexer lexer_;
    const RelationshipRegistry& registry_;
    Token cur_{Tok::End, {}, 0};
};

bool isIdentifier(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

std::string_view name(TokenClass t) {
    switch (t) {
        case TokenClass::Identifier: return "identifier";
        case TokenClass::LeftBracket: return "'['";
        case TokenClass::RightBracket: return "']'";
        case TokenClass::Colon: return "':'";
        case TokenClass::Arrow: return "arrow ('->' or '<->')";
        case TokenClass::End: return "end of input";
    }
    return "?";
}

bool operator==(const Correspondence& a, const Correspondence& b) {
    if (a.relationship != b.relationship || a.directed != b.directed) return false;
    if (a.left == b.left && a.right == b.right) return true;
    return !a.directed && a.left == b.right && a.right == b.left;
}

RelationshipRegistry::RelationshipRegistry() {
    add({"Similarity", true, std::nullopt});
    add({"Dependency", false, std::nullopt});
    add({"Induction", false, "Dependency"});
}

void RelationshipRegistry::add(RelationshipDef def) {
    if (!isIdentifier(def.name)) throw Error(ErrorCode::BadRequest, "relationship name must be an identifier");
    std::unique_lock lock(mutex_);
    if (defs_.count(def.name)) throw Error(ErrorCode::DuplicateName, def.name);
    // parents must already exist, so the chain cannot loop back
    if (def.parent && !defs_.count(*def.parent)) throw Error(ErrorCode::UnknownParent, *def.parent);
    defs_.emplace(def.name, std::move(def));
}

std::optional<RelationshipDef> RelationshipRegistry::find(const std::string& name) const {
    std::shared_lock lock(mutex_);
    if (auto it = defs_.find(name); it != defs_.end()) return it->second;
    return std::nullopt;
}

std::vector<RelationshipDef> RelationshipRegistry::all() const {
    std::shared_lock lock(mutex_);
    std::vector<RelationshipDef> out;
    for (const auto& [n, d] : defs_) out.push_back(d);
    return out;
}

std::vector<std::string> RelationshipRegistry::lineage(const std::string& name) const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    auto it = defs_.find(name);
    while (it != defs_.end() && it->second.parent) {
        out.push_back(*it->second.parent);
        it = defs_.find(*it->second.parent);
    }
    return out;
}

Correspondence parse(std::string_view text, const RelationshipRegistry& registry) {
    return Parser(text, registry).parse();
}

std::string render(const Correspondence& c) {
    return c.relationship + "[" + c.left.metamodel + ":" + c.left.element + (c.directed ? " -> " : " <-> ") +
           c.right.metamodel + ":" + c.right.element + "]";
}

std::string canonicalize(std::string_view text, const RelationshipRegistry& registry) {
    return render(parse(text, registry));
}

}  // namespace gdm::notation
