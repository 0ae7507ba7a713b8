#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gdm/notation.hpp"

using namespace gdm;
using namespace gdm::notation;

TEST_CASE("the three relationship forms parse") {
    RelationshipRegistry reg;
    auto s = parse("Similarity[BP:DataObject \xE2\x86\x94 SD:Entity]", reg);
    CHECK(s.relationship == "Similarity");
    CHECK_FALSE(s.directed);
    CHECK(s.left == Endpoint{"BP", "DataObject"});
    CHECK(s.right == Endpoint{"SD", "Entity"});
    auto d = parse("Dependency[BP:Task \xE2\x86\x92 SD:Operation]", reg);
    CHECK(d.directed);
    auto i = parse("Induction[ BP:Task->SD:Operation ]", reg);
    CHECK(render(i) == "Induction[BP:Task -> SD:Operation]");
    CHECK(render(s) == "Similarity[BP:DataObject <-> SD:Entity]");
    CHECK(reg.lineage("Induction") == std::vector<std::string>{"Dependency"});
}

TEST_CASE("symmetric correspondences ignore endpoint order") {
    RelationshipRegistry reg;
    CHECK(parse("Similarity[A:x <-> B:y]", reg) == parse("Similarity[B:y <-> A:x]", reg));
    CHECK_FALSE(parse("Dependency[A:x -> B:y]", reg) == parse("Dependency[B:y -> A:x]", reg));
}

TEST_CASE("arrow must match the relationship") {
    RelationshipRegistry reg;
    try {
        parse("Similarity[A:x -> B:y]", reg);
        FAIL("expected ArrowMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ArrowMismatch);
    }
    try {
        parse("Dependency[A:x <-> B:y]", reg);
        FAIL("expected ArrowMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ArrowMismatch);
    }
    try {
        parse("Nope[A:x -> B:y]", reg);
        FAIL("expected UnknownRelationship");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownRelationship);
    }
}

TEST_CASE("syntax errors carry offset and expected token") {
    RelationshipRegistry reg;
    struct Case {
        std::string text;
        std::size_t offset;
        TokenClass expected;
    };
    const std::vector<Case> cases{
        {"Dependency", 10, TokenClass::LeftBracket},
        {"Dependency[A x -> B:y]", 13, TokenClass::Colon},
        {"Dependency[A:x B:y]", 15, TokenClass::Arrow},
        {"Dependency[A:x -> B:y", 21, TokenClass::RightBracket},
        {"Dependency[A:x -> B:y] extra", 23, TokenClass::End},
        {"[A:x -> B:y]", 0, TokenClass::Identifier},
    };
    for (const auto& c : cases) {
        INFO(c.text);
        try {
            parse(c.text, reg);
            FAIL("expected SyntaxError");
        } catch (const SyntaxError& e) {
            CHECK(e.offset() == c.offset);
            CHECK(e.expected() == c.expected);
            CHECK(e.code() == ErrorCode::SyntaxError);
        }
    }
    CHECK_THROWS_AS(parse("Dependency[A:x -> A:x]", reg), SyntaxError);
}

TEST_CASE("registry rejects duplicates and unknown parents") {
    RelationshipRegistry reg;
    try {
        reg.add({"Similarity", true, std::nullopt});
        FAIL("expected DuplicateName");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateName);
    }
    try {
        reg.add({"Refinement", false, "Missing"});
        FAIL("expected UnknownParent");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownParent);
    }
    reg.add({"Derivation", false, "Induction"});
    CHECK(reg.lineage("Derivation") == std::vector<std::string>{"Induction", "Dependency"});
    CHECK(canonicalize("Derivation[X:a->Y:b]", reg) == "Derivation[X:a -> Y:b]");
}

TEST_CASE("render and parse round-trip") {
    RelationshipRegistry reg;
    std::mt19937 rng(11);
    const std::string alpha = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    auto ident = [&] {
        std::string s(1, alpha[rng() % alpha.size()]);
        const int len = static_cast<int>(rng() % 8);
        for (int i = 0; i < len; ++i) s += (rng() % 4 ? alpha[rng() % alpha.size()] : static_cast<char>('0' + rng() % 10));
        return s;
    };
    const std::vector<std::string> rels{"Similarity", "Dependency", "Induction"};
    for (int i = 0; i < 1000; ++i) {
        Correspondence c;
        c.relationship = rels[rng() % rels.size()];
        c.directed = c.relationship != "Similarity";
        c.left = {ident(), ident()};
        do c.right = {ident(), ident()};
        while (c.right == c.left);
        const auto text = render(c);
        const auto back = parse(text, reg);
        CHECK(back == c);
        CHECK(render(back) == text);
        // unicode arrows and extra spacing canonicalize to the same text
        std::string fancy = c.relationship + "[ " + c.left.metamodel + ":" + c.left.element +
                            (c.directed ? " \xE2\x86\x92 " : " \xE2\x86\x94 ") + c.right.metamodel + ":" +
                            c.right.element + " ]";
        CHECK(canonicalize(fancy, reg) == text);
    }
}
