#include "gdm/aggregation.hpp"

#include <algorithm>
#include <numeric>

#include "gdm/error.hpp"

namespace gdm {

Fraction thresholdValue(AgreementThreshold t, const ThresholdMapping& mapping) {
    switch (t) {
        case AgreementThreshold::Low: return mapping.low;
        case AgreementThreshold::Medium: return mapping.medium;
        case AgreementThreshold::High: return mapping.high;
        case AgreementThreshold::Strict: return Fraction{1};
    }
    return Fraction{1};
}

bool meets(const Fraction& score, AgreementThreshold t, const std::optional<Fraction>& override,
           const ThresholdMapping& mapping) {
    if (override) return score >= *override;
    switch (t) {
        case AgreementThreshold::Strict: return score == 1;
        case AgreementThreshold::Low: return score > mapping.low;
        case AgreementThreshold::Medium:
        case AgreementThreshold::High: return score >= thresholdValue(t, mapping);
    }
    return false;
}

AgreementKind deriveKind(const Decision& d, PreferenceKind prefKind) {
    if (prefKind == PreferenceKind::YesNo || !d.rating) return d.kind;
    if (*d.rating >= 4) return AgreementKind::Approval;
    if (*d.rating <= 2) return AgreementKind::Reject;
    return AgreementKind::Refinement;
}

namespace {

bool approves(const Ballot& b, PreferenceKind pref) {
    if (pref == PreferenceKind::Rating && b.rating > 0) return b.rating >= 4;
    return b.kind == AgreementKind::Approval;
}

void accumulate(TallyRow& row, const Ballot& b, const Fraction& w, PreferenceKind pref) {
    row.totalWeight += w;
    ++row.voterCount;
    if (approves(b, pref)) row.weightedApproval += w;
    if (pref == PreferenceKind::Rating && b.rating > 0) {
        row.weightedRating += w * b.rating;
        ++row.ratedCount;
    }
}

RoundTally toTally(const std::string& id, int round, const TallyRow& row, PreferenceKind pref) {
    RoundTally t;
    t.proposalId = id;
    t.round = round;
    t.weightedApproval = row.weightedApproval;
    t.totalWeight = row.totalWeight;
    t.voterCount = row.voterCount;
    t.score = row.totalWeight > 0 ? row.weightedApproval / row.totalWeight : Fraction{0};
    if (pref == PreferenceKind::Rating && row.ratedCount > 0) t.meanRating = row.weightedRating / row.totalWeight;
    return t;
}

// Ballots grouped by candidate (CSR layout).
struct BallotIndex {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> order;
};

BallotIndex indexBallots(const RoundInput& in) {
    BallotIndex idx;
    idx.offsets.assign(in.candidates.size() + 1, 0);
    for (const auto& b : in.ballots) ++idx.offsets[static_cast<std::size_t>(b.candidate) + 1];
    std::partial_sum(idx.offsets.begin(), idx.offsets.end(), idx.offsets.begin());
    idx.order.resize(in.ballots.size());
    auto cursor = idx.offsets;
    for (std::size_t i = 0; i < in.ballots.size(); ++i)
        idx.order[cursor[static_cast<std::size_t>(in.ballots[i].candidate)]++] = i;
    return idx;
}

constexpr std::ptrdiff_t kParallelCutoff = 64;

}  // namespace

std::vector<TallyRow> tallyRound(const RoundInput& in) {
    const auto n = static_cast<std::ptrdiff_t>(in.candidates.size());
    // a parallel region costs more than a small round
    if (n <= kParallelCutoff) return tallyRoundSerial(in);
    const auto idx = indexBallots(in);
    std::vector<TallyRow> rows(in.candidates.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < n; ++c) {
        auto& row = rows[static_cast<std::size_t>(c)];
        for (auto k = idx.offsets[static_cast<std::size_t>(c)]; k < idx.offsets[static_cast<std::size_t>(c) + 1]; ++k) {
            const auto& b = in.ballots[idx.order[k]];
            accumulate(row, b, in.weights[static_cast<std::size_t>(b.voter)], in.preferenceKind);
        }
    }
    return rows;
}

std::vector<TallyRow> tallyRoundSerial(const RoundInput& in) {
    std::vector<TallyRow> rows(in.candidates.size());
    for (const auto& b : in.ballots)
        accumulate(rows[static_cast<std::size_t>(b.candidate)], b, in.weights[static_cast<std::size_t>(b.voter)],
                   in.preferenceKind);
    return rows;
}

RoundTally approvalScore(const std::string& proposalId, std::span<const Decision> decisions,
                         const std::map<std::string, Fraction>& weights, PreferenceKind prefKind,
                         AgreementThreshold threshold, const std::optional<Fraction>& override,
                         const ThresholdMapping& mapping) {
    TallyRow row;
    int round = 0;
    for (const auto& d : decisions) {
        if (!d.binding || d.proposalId != proposalId) continue;
        auto w = weights.find(d.decisionMakerId);
        if (w == weights.end()) throw Error(ErrorCode::UnknownActor, d.decisionMakerId);
        Ballot b{0, 0, d.kind, d.rating.value_or(0)};
        accumulate(row, b, w->second, prefKind);
        round = d.round;
    }
    if (row.voterCount == 0) throw Error(ErrorCode::EmptyRound, "no binding decision on " + proposalId);
    auto t = toTally(proposalId, round, row, prefKind);
    t.derivedOutcome = meets(t.score, threshold, override, mapping) ? TallyOutcome::Approved : TallyOutcome::NotApproved;
    return t;
}

std::optional<std::size_t> resolveConflicts(std::span<const ConflictEntry> members, PreferenceKind prefKind) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!members[i].met) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& a = members[i].tally;
        const auto& b = members[*best].tally;
        if (a.score != b.score) {
            if (a.score > b.score) best = i;
            continue;
        }
        if (prefKind == PreferenceKind::Rating) {
            auto ra = a.meanRating.value_or(Fraction{0});
            auto rb = b.meanRating.value_or(Fraction{0});
            if (ra != rb) {
                if (ra > rb) best = i;
                continue;
            }
        }
        if (members[i].createdAt != members[*best].createdAt) {
            if (members[i].createdAt < members[*best].createdAt) best = i;
            continue;
        }
        if (a.proposalId < b.proposalId) best = i;
    }
    return best;
}

std::vector<int> quorumDeficits(const RoundInput& in) {
    std::vector<int> voters(in.candidates.size(), 0);
    std::vector<bool> finalVoted(in.candidates.size(), false);
    for (const auto& b : in.ballots) {
        ++voters[static_cast<std::size_t>(b.candidate)];
        if (in.finalDecisionMaker && b.voter == *in.finalDecisionMaker) finalVoted[static_cast<std::size_t>(b.candidate)] = true;
    }
    const auto required = static_cast<int>((in.eligibleCount + 1) / 2);
    std::vector<int> deficient;
    for (std::size_t c = 0; c < in.candidates.size(); ++c) {
        bool ok = in.finalDecisionMaker ? finalVoted[c] : voters[c] >= std::max(required, 1);
        if (!ok) deficient.push_back(static_cast<int>(c));
    }
    return deficient;
}

namespace {

// Connected components of the conflict graph restricted to candidates.
std::vector<int> conflictComponents(const RoundInput& in, int& count) {
    const auto n = in.candidates.size();
    std::vector<int> comp(n, -1);
    count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] != -1 || in.candidates[s].conflicts.empty()) continue;
        stack.assign(1, s);
        comp[s] = count;
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            for (int nb : in.candidates[cur].conflicts) {
                auto u = static_cast<std::size_t>(nb);
                if (comp[u] == -1) {
                    comp[u] = count;
                    stack.push_back(u);
                }
            }
        }
        ++count;
    }
    return comp;
}

}  // namespace

RoundResult aggregate(const RoundInput& in) {
    if (auto deficits = quorumDeficits(in); !deficits.empty()) {
        std::string ids;
        for (int c : deficits) ids += (ids.empty() ? "" : ",") + in.candidates[static_cast<std::size_t>(c)].proposalId;
        throw Error(ErrorCode::QuorumNotReached, ids);
    }

    const auto n = in.candidates.size();
    const auto rows = tallyRound(in);
    RoundResult result;
    result.outcomes.resize(n);
    std::vector<RoundTally> tallies(n);
    std::vector<bool> met(n);
    for (std::size_t c = 0; c < n; ++c) {
        auto& out = result.outcomes[c];
        tallies[c] = toTally(in.candidates[c].proposalId, in.round, rows[c], in.preferenceKind);
        if (rows[c].voterCount > 0) {
            out.metThreshold = meets(tallies[c].score, in.threshold, in.thresholdOverride, in.mapping);
            out.explicitlyRejected = !out.metThreshold &&
                                     meets(Fraction{1} - tallies[c].score, in.threshold, in.thresholdOverride, in.mapping);
            tallies[c].derivedOutcome = out.metThreshold ? TallyOutcome::Approved : TallyOutcome::NotApproved;
        }
        met[c] = out.metThreshold && !in.candidates[c].blocked;
        if (in.candidates[c].blocked) {
            out.resolution = Resolution::Blocked;
            out.status = CollectiveStatus::Rejected;
        }
    }

    int components = 0;
    const auto comp = conflictComponents(in, components);
    std::vector<std::size_t> members;
    std::vector<ConflictEntry> entries;
    for (int k = 0; k < components; ++k) {
        members.clear();
        entries.clear();
        for (std::size_t c = 0; c < n; ++c)
            if (comp[c] == k) members.push_back(c);
        for (auto m : members) entries.push_back({tallies[m], met[m], in.candidates[m].createdAt});
        auto winner = resolveConflicts(entries, in.preferenceKind);
        for (std::size_t i = 0; i < members.size(); ++i) {
            auto& out = result.outcomes[members[i]];
            out.conflictSet = k;
            if (!winner || in.candidates[members[i]].blocked) continue;
            if (i == *winner) {
                out.resolution = Resolution::Winner;
                out.status = CollectiveStatus::Approved;
            } else {
                out.resolution = Resolution::LostConflict;
                out.status = CollectiveStatus::Rejected;
            }
        }
    }

    for (std::size_t c = 0; c < n; ++c) {
        auto& out = result.outcomes[c];
        if (rows[c].voterCount > 0) out.tally = std::move(tallies[c]);
        if (out.resolution != Resolution::None) continue;
        if (met[c]) {
            out.status = CollectiveStatus::Approved;
        } else if (out.explicitlyRejected) {
            out.status = CollectiveStatus::Rejected;
        } else {
            result.converged = false;
            if (!in.finalPass)
                out.status = CollectiveStatus::Pending;
            else
                out.status = in.iterationClass == IterationClass::Iterative ? CollectiveStatus::Unresolved
                                                                            : CollectiveStatus::Rejected;
        }
    }
    return result;
}

void to_json(nlohmann::json& j, const ThresholdMapping& m) {
    j = {{"low", fractionToJson(m.low)}, {"medium", fractionToJson(m.medium)}, {"high", fractionToJson(m.high)}};
}

void from_json(const nlohmann::json& j, ThresholdMapping& m) {
    m = {};
    if (j.contains("low")) m.low = fractionFromJson(j.at("low"));
    if (j.contains("medium")) m.medium = fractionFromJson(j.at("medium"));
    if (j.contains("high")) m.high = fractionFromJson(j.at("high"));
}

void to_json(nlohmann::json& j, const RoundTally& t) {
    j = {{"proposalId", t.proposalId},
         {"round", t.round},
         {"weightedApproval", fractionToJson(t.weightedApproval)},
         {"totalWeight", fractionToJson(t.totalWeight)},
         {"score", fractionToJson(t.score)},
         {"derivedOutcome", std::string(name(t.derivedOutcome))},
         {"voterCount", t.voterCount}};
    if (t.meanRating) j["meanRating"] = fractionToJson(*t.meanRating);
}

void from_json(const nlohmann::json& j, RoundTally& t) {
    t.proposalId = j.at("proposalId").get<std::string>();
    t.round = j.at("round").get<int>();
    t.weightedApproval = fractionFromJson(j.at("weightedApproval"));
    t.totalWeight = fractionFromJson(j.at("totalWeight"));
    t.score = fractionFromJson(j.at("score"));
    t.derivedOutcome = j.at("derivedOutcome").get<std::string>() == "approved" ? TallyOutcome::Approved
                                                                               : TallyOutcome::NotApproved;
    t.voterCount = j.at("voterCount").get<int>();
    if (j.contains("meanRating")) t.meanRating = fractionFromJson(j.at("meanRating"));
}

std::string_view name(TallyOutcome o) { return o == TallyOutcome::Approved ? "approved" : "notApproved"; }

std::string_view name(Resolution r) {
    switch (r) {
        case Resolution::None: return "none";
        case Resolution::Winner: return "winner";
        case Resolution::LostConflict: return "lostConflict";
        case Resolution::Blocked: return "blocked";
    }
    return "none";
}

Resolution parseResolution(std::string_view text) {
    for (auto r : {Resolution::None, Resolution::Winner, Resolution::LostConflict, Resolution::Blocked})
        if (name(r) == text) return r;
    throw Error(ErrorCode::BadRequest, "unknown resolution '" + std::string(text) + "'");
}

}  // namespace gdm
