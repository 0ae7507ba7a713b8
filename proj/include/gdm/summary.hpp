#pragma once

#include <string>

#include <json.hpp>

#include "gdm/aggregation.hpp"
#include "gdm/collaboration.hpp"

namespace gdm {

// One entry per proposal: body, author, kind, each decision maker's latest
// decision, score against the effective threshold, final status and how
// conflicts were resolved; plus the unresolved count and the work product.
nlohmann::json summaryJson(const Collaboration& c, const ThresholdMapping& mapping = {});

std::string summaryCsv(const Collaboration& c, const ThresholdMapping& mapping = {});
std::string summaryMarkdown(const Collaboration& c, const ThresholdMapping& mapping = {});

}  // namespace gdm
