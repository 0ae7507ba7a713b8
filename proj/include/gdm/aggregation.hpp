#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdm/fraction.hpp"
#include "gdm/model.hpp"
#include "gdm/vocabulary.hpp"

namespace gdm {

/// Numeric value behind each named threshold. `low` is exceeded strictly,
/// the others are met with >=, and strict always means exactly 1.
struct ThresholdMapping {
    Fraction low{1, 2};
    Fraction medium{2, 3};
    Fraction high{4, 5};

    bool operator==(const ThresholdMapping&) const = default;
};

Fraction thresholdValue(AgreementThreshold t, const ThresholdMapping& mapping = {});

bool meets(const Fraction& score, AgreementThreshold t, const std::optional<Fraction>& override = std::nullopt,
           const ThresholdMapping& mapping = {});

// yesNo keeps the submitted kind; rating maps 4-5 to approval, 1-2 to reject
// and 3 to refinement.
AgreementKind deriveKind(const Decision& d, PreferenceKind prefKind);

enum class TallyOutcome { Approved, NotApproved };

struct RoundTally {
    std::string proposalId;
    int round = 0;
    Fraction weightedApproval{0};
    Fraction totalWeight{0};
    Fraction score{0};
    TallyOutcome derivedOutcome = TallyOutcome::NotApproved;
    int voterCount = 0;
    // weighted mean rating, rating mode only
    std::optional<Fraction> meanRating;

    bool operator==(const RoundTally&) const = default;
};

// Tally of one proposal from its binding decisions of the round. Abstainers
// are simply absent; every submitted binding decision counts in the
// denominator. Throws EmptyRound when there is no binding decision.
RoundTally approvalScore(const std::string& proposalId, std::span<const Decision> decisions,
                         const std::map<std::string, Fraction>& weights, PreferenceKind prefKind,
                         AgreementThreshold threshold, const std::optional<Fraction>& override = std::nullopt,
                         const ThresholdMapping& mapping = {});

// ---------------------------------------------------------------------------
// Index-based round model. The collaboration adapter lowers a closed round to
// this form; tests and sweeps build it directly.

struct Ballot {
    int voter = 0;      // index into RoundInput::weights
    int candidate = 0;  // index into RoundInput::candidates
    AgreementKind kind = AgreementKind::Approval;  // as submitted
    int rating = 0;     // 1..5 in rating mode, 0 otherwise
};

struct Candidate {
    std::string proposalId;
    Timestamp createdAt = 0;
    std::vector<int> conflicts;  // other candidate indices
    // conflicts with a proposal approved in an earlier round
    bool blocked = false;
};

struct RoundInput {
    int round = 1;
    std::vector<Candidate> candidates;
    std::vector<Fraction> weights;  // per voter
    std::vector<Ballot> ballots;    // binding only, at most one per (voter, candidate)
    std::size_t eligibleCount = 0;
    PreferenceKind preferenceKind = PreferenceKind::YesNo;
    AgreementThreshold threshold = AgreementThreshold::Medium;
    std::optional<Fraction> thresholdOverride;
    ThresholdMapping mapping;
    IterationClass iterationClass = IterationClass::SingleElection;
    // last aggregation this collaboration will see: undecided proposals end
    // unresolved (iterative) or rejected (single election)
    bool finalPass = false;
    // advisory policies: only this voter's decision is required
    std::optional<int> finalDecisionMaker;
};

struct TallyRow {
    Fraction weightedApproval{0};
    Fraction totalWeight{0};
    Fraction weightedRating{0};
    int voterCount = 0;
    int ratedCount = 0;

    bool operator==(const TallyRow&) const = default;
};

// Per-candidate sums. The parallel kernel gathers each candidate's ballots
// independently; the serial reference scatters ballots into accumulators in
// one pass. Both must agree exactly.
std::vector<TallyRow> tallyRound(const RoundInput& input);
std::vector<TallyRow> tallyRoundSerial(const RoundInput& input);

enum class Resolution { None, Winner, LostConflict, Blocked };

struct CandidateOutcome {
    std::optional<RoundTally> tally;
    bool metThreshold = false;
    bool explicitlyRejected = false;
    CollectiveStatus status = CollectiveStatus::Pending;
    Resolution resolution = Resolution::None;
    int conflictSet = -1;  // component index, -1 when conflict-free

    bool operator==(const CandidateOutcome&) const = default;
};

struct RoundResult {
    std::vector<CandidateOutcome> outcomes;  // parallel to candidates
    bool converged = true;

    bool operator==(const RoundResult&) const = default;
};

// Candidates short of quorum: ceil(eligible/2) distinct binding voters, or the
// final decision maker's decision under an advisory policy.
std::vector<int> quorumDeficits(const RoundInput& input);

// Throws QuorumNotReached listing the deficient proposals.
RoundResult aggregate(const RoundInput& input);

struct ConflictEntry {
    RoundTally tally;
    bool met = false;
    Timestamp createdAt = 0;
};

// Picks at most one winner from a conflict set: highest score, then higher
// weighted mean rating (rating mode), then earlier createdAt, then smaller id.
// Returns an index into `members`, or nullopt when nobody met the threshold.
std::optional<std::size_t> resolveConflicts(std::span<const ConflictEntry> members, PreferenceKind prefKind);

void to_json(nlohmann::json& j, const ThresholdMapping& m);
void from_json(const nlohmann::json& j, ThresholdMapping& m);
void to_json(nlohmann::json& j, const RoundTally& t);
void from_json(const nlohmann::json& j, RoundTally& t);

std::string_view name(TallyOutcome o);
std::string_view name(Resolution r);
Resolution parseResolution(std::string_view text);

}  // namespace gdm
