#include "gdm/journal.hpp"

#include <array>
#include <fstream>
#include <iterator>

#include <unistd.h>
#include <zlib.h>

#include "gdm/error.hpp"

namespace gdm {

namespace {

constexpr std::uint32_t kMaxFrame = 64u << 20;

void putU32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t getU32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t checksum(std::string_view payload) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
}

}  // namespace

std::string_view name(RecordType t) {
    switch (t) {
        case RecordType::Command: return "command";
        case RecordType::Event: return "event";
        case RecordType::Audit: return "audit";
    }
    return "?";
}

RecordType parseRecordType(std::string_view text) {
    if (text == "command") return RecordType::Command;
    if (text == "event") return RecordType::Event;
    if (text == "audit") return RecordType::Audit;
    throw Error(ErrorCode::CorruptLog, "unknown record type '" + std::string(text) + "'");
}

JournalScan Journal::read(const std::filesystem::path& path) {
    JournalScan scan;
    std::ifstream in(path, std::ios::binary);
    if (!in) return scan;
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    std::uint64_t pos = 0;
    while (pos < data.size()) {
        if (data.size() - pos < 8) {
            scan.corruptAt = pos;
            break;
        }
        const auto len = getU32(bytes + pos);
        const auto crc = getU32(bytes + pos + 4);
        if (len > kMaxFrame || data.size() - pos - 8 < len) {
            scan.corruptAt = pos;
            break;
        }
        std::string_view payload(data.data() + pos + 8, len);
        if (checksum(payload) != crc) {
            scan.corruptAt = pos;
            break;
        }
        try {
            auto j = nlohmann::json::parse(payload);
            JournalRecord r;
            r.type = parseRecordType(j.at("type").get<std::string>());
            r.seq = j.at("seq").get<std::uint64_t>();
            r.collaborationId = j.at("collaborationId").get<std::string>();
            r.payload = j.at("payload");
            scan.records.push_back(std::move(r));
            scan.offsets.push_back(pos);
        } catch (const std::exception&) {
            scan.corruptAt = pos;
            break;
        }
        pos += 8 + len;
        scan.validBytes = pos;
    }
    return scan;
}

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    recovered_ = read(path_);
    if (recovered_.corruptAt) std::filesystem::resize_file(path_, recovered_.validBytes);
    if (!recovered_.records.empty()) nextSeq_ = recovered_.records.back().seq + 1;
    file_ = std::fopen(path_.c_str(), "ab");
    if (!file_) throw Error(ErrorCode::CorruptLog, "cannot open " + path_.string());
}

Journal::~Journal() {
    if (file_) std::fclose(file_);
}

std::uint64_t Journal::append(RecordType type, const std::string& collaborationId, const nlohmann::json& payload) {
    std::lock_guard lock(mutex_);
    const auto seq = nextSeq_;
    nlohmann::json j = {{"type", name(type)}, {"seq", seq}, {"collaborationId", collaborationId}, {"payload", payload}};
    const auto body = j.dump();
    std::string frame;
    frame.reserve(body.size() + 8);
    putU32(frame, static_cast<std::uint32_t>(body.size()));
    putU32(frame, checksum(body));
    frame += body;
    if (std::fwrite(frame.data(), 1, frame.size(), file_) != frame.size() || std::fflush(file_) != 0 ||
        ::fsync(fileno(file_)) != 0)
        throw Error(ErrorCode::CorruptLog, "write to " + path_.string() + " failed");
    ++nextSeq_;
    return seq;
}

}  // namespace gdm
