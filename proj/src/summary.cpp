#include "gdm/summary.hpp"

#include <sstream>

namespace gdm {

namespace {

std::string csvField(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string mdCell(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '|') out += '\\';
        out += ch == '\n' ? ' ' : ch;
    }
    return out;
}

std::string text(const nlohmann::json& j) {
    if (j.is_null()) return "";
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

}  // namespace

nlohmann::json summaryJson(const Collaboration& c, const ThresholdMapping& mapping) {
    nlohmann::json out;
    out["collaborationId"] = c.collaborationId;
    out["intent"] = c.intent;
    out["state"] = c.state;
    out["policyId"] = c.adoptedPolicyId;
    out["round"] = c.currentRound;

    nlohmann::json threshold = nullptr;
    if (c.policy) {
        const auto named = c.policy->coDecision.threshold;
        const auto value = c.thresholdOverride ? *c.thresholdOverride : thresholdValue(named, mapping);
        threshold = {{"name", named},
                     {"value", fractionToJson(value)},
                     {"overridden", c.thresholdOverride.has_value()},
                     {"strictlyAbove", !c.thresholdOverride && named == AgreementThreshold::Low}};
    }
    out["threshold"] = threshold;

    nlohmann::json proposals = nlohmann::json::array();
    for (const auto& [id, p] : c.proposals.all()) {
        nlohmann::json entry = {{"proposalId", id},
                                {"title", p.title},
                                {"body", p.body},
                                {"authorId", p.authorId},
                                {"kind", p.kind},
                                {"status", p.collectiveDecision},
                                {"withdrawn", p.withdrawn},
                                {"conflictsWith", p.conflictsWith}};
        if (p.refines) entry["refines"] = *p.refines;
        if (!p.children.empty()) entry["children"] = p.children;

        // latest decision of every decision maker on this proposal
        std::map<std::string, const Decision*> latest;
        for (const auto& d : c.decisions)
            if (d.proposalId == id) latest[d.decisionMakerId] = &d;
        nlohmann::json decisions = nlohmann::json::array();
        for (const auto& [dm, d] : latest) {
            nlohmann::json dj = {{"decisionMakerId", dm}, {"kind", d->kind}, {"round", d->round}, {"binding", d->binding}};
            if (d->rating) dj["rating"] = *d->rating;
            if (d->comment) dj["comment"] = d->comment->text;
            if (d->alternativeId) dj["alternativeId"] = *d->alternativeId;
            decisions.push_back(std::move(dj));
        }
        entry["decisions"] = std::move(decisions);

        if (auto it = c.outcomes.find(id); it != c.outcomes.end()) {
            const auto& o = it->second;
            entry["score"] = o.tally ? fractionToJson(o.tally->score) : nlohmann::json(nullptr);
            entry["scoreDecimal"] = o.tally ? nlohmann::json(toDouble(o.tally->score)) : nlohmann::json(nullptr);
            entry["round"] = o.tally ? nlohmann::json(o.tally->round) : nlohmann::json(nullptr);
            entry["metThreshold"] = o.metThreshold;
            entry["resolution"] = name(o.resolution);
            entry["conflictSet"] = o.conflictSet < 0 ? nlohmann::json(nullptr) : nlohmann::json(o.conflictSet);
        } else {
            entry["score"] = nullptr;
            entry["resolution"] = nullptr;
            entry["conflictSet"] = nullptr;
        }
        proposals.push_back(std::move(entry));
    }
    out["proposals"] = std::move(proposals);
    out["unresolvedCount"] = c.unresolvedCount();
    out["workProduct"] = c.workProduct ? nlohmann::json(*c.workProduct) : nlohmann::json(nullptr);
    return out;
}

std::string summaryCsv(const Collaboration& c, const ThresholdMapping& mapping) {
    const auto s = summaryJson(c, mapping);
    std::ostringstream os;
    os << "proposalId,kind,authorId,body,status,score,resolution,conflictSet,decisions\n";
    for (const auto& p : s["proposals"]) {
        std::string decisions;
        for (const auto& d : p["decisions"]) {
            if (!decisions.empty()) decisions += ';';
            decisions += d["decisionMakerId"].get<std::string>() + "=" + d["kind"].get<std::string>();
        }
        os << csvField(p["proposalId"].get<std::string>()) << ',' << text(p["kind"]) << ','
           << csvField(text(p["authorId"])) << ',' << csvField(text(p["body"])) << ',' << text(p["status"]) << ','
           << csvField(text(p["score"])) << ',' << text(p["resolution"]) << ',' << text(p["conflictSet"]) << ','
           << csvField(decisions) << '\n';
    }
    return os.str();
}

std::string summaryMarkdown(const Collaboration& c, const ThresholdMapping& mapping) {
    const auto s = summaryJson(c, mapping);
    std::ostringstream os;
    os << "# " << mdCell(c.intent.empty() ? c.collaborationId : c.intent) << "\n\n";
    os << "- policy: " << (c.adoptedPolicyId.empty() ? "(none)" : c.adoptedPolicyId) << "\n";
    os << "- state: " << name(c.state) << ", round " << c.currentRound << "\n";
    if (!s["threshold"].is_null())
        os << "- threshold: " << text(s["threshold"]["name"]) << " (" << text(s["threshold"]["value"]) << ")\n";
    os << "- unresolved: " << s["unresolvedCount"].get<std::size_t>() << "\n\n";
    os << "| proposal | kind | author | body | decisions | score | status | resolution |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& p : s["proposals"]) {
        std::string decisions;
        for (const auto& d : p["decisions"]) {
            if (!decisions.empty()) decisions += ", ";
            decisions += d["decisionMakerId"].get<std::string>() + ": " + d["kind"].get<std::string>();
        }
        os << "| " << mdCell(p["proposalId"].get<std::string>()) << " | " << text(p["kind"]) << " | "
           << mdCell(text(p["authorId"])) << " | " << mdCell(text(p["body"])) << " | " << mdCell(decisions) << " | "
           << text(p["score"]) << " | " << text(p["status"]) << " | " << text(p["resolution"]) << " |\n";
    }
    if (c.workProduct) {
        os << "\nWork product:";
        for (const auto& id : c.workProduct->approvedProposalIds) os << ' ' << id;
        os << '\n';
    }
    return os.str();
}

}  // namespace gdm
