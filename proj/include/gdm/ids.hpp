#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "gdm/vocabulary.hpp"

namespace gdm {

using Clock = std::function<Timestamp()>;

Timestamp systemNow();

// 26-character Crockford base32 identifier: 10 characters of timestamp
// followed by 16 characters derived from (salt, ordinal). Identifiers sort by
// creation time and are reproducible from the same inputs, which is what makes
// log replay yield the same ids.
std::string makeSortableId(Timestamp at, std::string_view salt, std::uint64_t ordinal);

}  // namespace gdm
