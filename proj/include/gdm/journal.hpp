#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gdm {

enum class RecordType { Command, Event, Audit };

struct JournalRecord {
    RecordType type = RecordType::Command;
    std::uint64_t seq = 0;  // journal-wide, from 1
    std::string collaborationId;
    nlohmann::json payload;

    bool operator==(const JournalRecord&) const = default;
};

struct JournalScan {
    std::vector<JournalRecord> records;
    std::vector<std::uint64_t> offsets;  // byte offset of each record's frame
    std::optional<std::uint64_t> corruptAt;
    std::uint64_t validBytes = 0;
};

/// Append-only record log. Each frame is a little-endian u32 payload length,
/// a u32 CRC-32 of the payload and the payload itself (compact JSON). Every
/// append is flushed and fsync'd before it returns.
class Journal {
public:
    // Opens (creating if needed). A torn or corrupt tail is cut off so that new
    // frames follow the last valid one; `recovered()` reports what was read.
    explicit Journal(std::filesystem::path path);
    ~Journal();

    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    std::uint64_t append(RecordType type, const std::string& collaborationId, const nlohmann::json& payload);

    const JournalScan& recovered() const { return recovered_; }
    const std::filesystem::path& path() const { return path_; }

    // Reads without modifying the file.
    static JournalScan read(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    std::FILE* file_ = nullptr;
    std::uint64_t nextSeq_ = 1;
    JournalScan recovered_;
    std::mutex mutex_;
};

std::string_view name(RecordType t);
RecordType parseRecordType(std::string_view text);

}  // namespace gdm
