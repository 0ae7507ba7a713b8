#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gdm/journal.hpp"

using namespace gdm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("gdm_journal_" + name + "_" + std::to_string(::getpid()));
    fs::remove(p);
    return p;
}

}  // namespace

TEST_CASE("records survive a reopen") {
    auto path = scratch("reopen");
    {
        Journal j(path);
        CHECK(j.append(RecordType::Command, "c1", {{"n", 1}}) == 1);
        CHECK(j.append(RecordType::Event, "c1", {{"n", 2}}) == 2);
    }
    Journal j(path);
    const auto& scan = j.recovered();
    REQUIRE(scan.records.size() == 2);
    CHECK(scan.records[1].type == RecordType::Event);
    CHECK(scan.records[1].payload["n"] == 2);
    CHECK_FALSE(scan.corruptAt.has_value());
    CHECK(j.append(RecordType::Audit, "", {{"n", 3}}) == 3);
    CHECK(Journal::read(path).records.size() == 3);
    fs::remove(path);
}

TEST_CASE("a torn tail is cut off at every byte") {
    auto path = scratch("torn");
    {
        Journal j(path);
        for (int i = 0; i < 3; ++i) j.append(RecordType::Command, "c1", {{"i", i}});
    }
    const auto full = fs::file_size(path);
    const auto scan = Journal::read(path);
    const auto lastStart = scan.offsets.back();
    std::string bytes;
    {
        std::ifstream in(path, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    for (auto cut = lastStart + 1; cut < full; ++cut) {
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out.write(bytes.data(), static_cast<std::streamsize>(cut));
        }
        auto torn = Journal::read(path);
        CHECK(torn.records.size() == 2);
        REQUIRE(torn.corruptAt.has_value());
        CHECK(*torn.corruptAt == lastStart);
        {
            Journal j(path);
            CHECK(j.recovered().records.size() == 2);
            CHECK(fs::file_size(path) == lastStart);
            CHECK(j.append(RecordType::Command, "c1", {{"i", 9}}) == 3);
        }
        auto again = Journal::read(path);
        CHECK(again.records.size() == 3);
        CHECK_FALSE(again.corruptAt.has_value());
    }
    fs::remove(path);
}

TEST_CASE("a flipped payload byte fails the checksum") {
    auto path = scratch("crc");
    {
        Journal j(path);
        j.append(RecordType::Command, "c1", {{"value", "abcdef"}});
        j.append(RecordType::Command, "c1", {{"value", "ghijkl"}});
    }
    const auto second = Journal::read(path).offsets[1];
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(static_cast<std::streamoff>(second + 12));
        f.put('#');
    }
    auto scan = Journal::read(path);
    CHECK(scan.records.size() == 1);
    REQUIRE(scan.corruptAt.has_value());
    CHECK(*scan.corruptAt == second);
    fs::remove(path);
}
