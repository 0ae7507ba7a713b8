#include "gdm/ids.hpp"

#include <chrono>

namespace gdm {

namespace {

constexpr std::string_view kCrockford = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

Timestamp systemNow() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string makeSortableId(Timestamp at, std::string_view salt, std::uint64_t ordinal) {
    std::string out(26, '0');
    auto time = static_cast<std::uint64_t>(at) & ((1ULL << 48) - 1);
    for (int i = 9; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kCrockford[time & 31];
        time >>= 5;
    }
    // 80 bits: 16 from the salt hash, 64 from the ordinal
    std::uint64_t hi = fnv1a(salt) & 0xFFFF;
    std::uint64_t lo = ordinal;
    for (int i = 25; i >= 10; --i) {
        out[static_cast<std::size_t>(i)] = kCrockford[lo & 31];
        lo = (lo >> 5) | ((hi & 31) << 59);
        hi >>= 5;
    }
    return out;
}

}  // namespace gdm
