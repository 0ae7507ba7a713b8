#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gdm/config.hpp"
#include "gdm/error.hpp"

using namespace gdm;

TEST_CASE("defaults") {
    auto c = parseConfig("");
    CHECK(c.host == "127.0.0.1");
    CHECK(c.port == 8080);
    CHECK_FALSE(c.log.has_value());
    CHECK(c.thresholds.medium == Fraction(2, 3));
}

TEST_CASE("full file") {
    auto c = parseConfig(R"(# service
port = 9090
host = "0.0.0.0"
log = "/tmp/gdm.log"   # journal
max_rounds = 3

[thresholds]
low = "1/2"
medium = 0.7
high = "4/5"

[tokens]
"tok-mod" = "mod"
tok1 = "dm1"
)");
    CHECK(c.port == 9090);
    CHECK(c.host == "0.0.0.0");
    CHECK(c.log->string() == "/tmp/gdm.log");
    CHECK(c.maxRounds == 3);
    CHECK(c.thresholds.medium == Fraction(7, 10));
    CHECK(c.tokens.at("tok-mod") == "mod");
    CHECK(c.tokens.at("tok1") == "dm1");
}

TEST_CASE("bad files are rejected") {
    CHECK_THROWS_AS(parseConfig("port = eighty"), Error);
    CHECK_THROWS_AS(parseConfig("colour = \"red\""), Error);
    CHECK_THROWS_AS(parseConfig("[thresholds]\nhigh = \"3/2\""), Error);
    CHECK_THROWS_AS(parseConfig("[thresholds]\nlow = \"9/10\""), Error);
    CHECK_THROWS_AS(parseConfig("[other]"), Error);
    CHECK_THROWS_AS(parseConfig("max_rounds = 0"), Error);
    CHECK_THROWS_AS(parseConfig("host = bare"), Error);
}
