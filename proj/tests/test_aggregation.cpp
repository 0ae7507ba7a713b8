#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gdm/aggregation.hpp"
#include "gdm/error.hpp"
#include "oracle/oracle.hpp"

using namespace gdm;
using AT = AgreementThreshold;

namespace {

Decision cast(const std::string& who, AgreementKind kind, std::optional<int> rating = std::nullopt) {
    Decision d;
    d.decisionMakerId = who;
    d.proposalId = "p";
    d.kind = kind;
    d.rating = rating;
    return d;
}

}  // namespace

TEST_CASE("meets uses exact thresholds") {
    CHECK_FALSE(meets(Fraction(3, 5), AT::High));
    CHECK(meets(Fraction(4, 5), AT::High));
    CHECK(meets(Fraction(1), AT::Strict));
    CHECK_FALSE(meets(Fraction(99, 100), AT::Strict));
    CHECK_FALSE(meets(Fraction(1, 2), AT::Low));
    CHECK(meets(Fraction(51, 100), AT::Low));
    CHECK(meets(Fraction(2, 3), AT::Medium));
    CHECK_FALSE(meets(Fraction(666, 1000), AT::Medium));
    CHECK(meets(Fraction(3, 5), AT::High, Fraction(1, 2)));
    CHECK(meets(Fraction(1, 2), AT::Low, Fraction(1, 2)));
}

TEST_CASE("configured mapping moves the thresholds") {
    ThresholdMapping m;
    m.high = Fraction(3, 5);
    CHECK(meets(Fraction(3, 5), AT::High, std::nullopt, m));
    CHECK(thresholdValue(AT::Strict, m) == 1);
}

TEST_CASE("rating to kind mapping") {
    for (int r = 1; r <= 5; ++r) {
        auto kind = deriveKind(cast("a", AgreementKind::Approval, r), PreferenceKind::Rating);
        CHECK(kind == (r >= 4 ? AgreementKind::Approval : r <= 2 ? AgreementKind::Reject : AgreementKind::Refinement));
    }
    CHECK(deriveKind(cast("a", AgreementKind::Reject), PreferenceKind::YesNo) == AgreementKind::Reject);
}

TEST_CASE("approval score") {
    std::map<std::string, Fraction> w;
    std::vector<Decision> ds;
    for (int i = 0; i < 5; ++i) {
        w["v" + std::to_string(i)] = 1;
        ds.push_back(cast("v" + std::to_string(i), i < 3 ? AgreementKind::Approval : AgreementKind::Reject));
    }
    auto t = approvalScore("p", ds, w, PreferenceKind::YesNo, AT::High);
    CHECK(t.score == Fraction(3, 5));
    CHECK(t.derivedOutcome == TallyOutcome::NotApproved);

    std::map<std::string, Fraction> w2{{"a", 2}, {"b", 1}, {"c", 1}};
    std::vector<Decision> d2{cast("a", AgreementKind::Approval), cast("b", AgreementKind::Reject),
                             cast("c", AgreementKind::Refinement)};
    CHECK(approvalScore("p", d2, w2, PreferenceKind::YesNo, AT::Low).score == Fraction(1, 2));

    std::vector<Decision> one{cast("a", AgreementKind::Approval)};
    CHECK(approvalScore("p", one, w2, PreferenceKind::YesNo, AT::Strict).score == 1);

    std::vector<Decision> none;
    CHECK_THROWS_AS(approvalScore("p", none, w2, PreferenceKind::YesNo, AT::Low), Error);
}

TEST_CASE("conflict resolution tie-breaks") {
    auto entry = [](const std::string& id, Fraction score, Timestamp at, bool met = true,
                    std::optional<Fraction> rating = std::nullopt) {
        ConflictEntry e;
        e.tally.proposalId = id;
        e.tally.score = score;
        e.tally.meanRating = rating;
        e.met = met;
        e.createdAt = at;
        return e;
    };
    std::vector<ConflictEntry> v{entry("ep", Fraction(2, 5), 1, false), entry("ap", Fraction(9, 10), 2)};
    CHECK(resolveConflicts(v, PreferenceKind::YesNo) == std::optional<std::size_t>(1));

    std::vector<ConflictEntry> neither{entry("a", Fraction(1, 5), 1, false), entry("b", Fraction(1, 5), 2, false)};
    CHECK_FALSE(resolveConflicts(neither, PreferenceKind::YesNo).has_value());

    std::vector<ConflictEntry> tie{entry("b", Fraction(4, 5), 5), entry("a", Fraction(4, 5), 3)};
    CHECK(resolveConflicts(tie, PreferenceKind::YesNo) == std::optional<std::size_t>(1));

    std::vector<ConflictEntry> sameTime{entry("b", Fraction(4, 5), 3), entry("a", Fraction(4, 5), 3)};
    CHECK(resolveConflicts(sameTime, PreferenceKind::YesNo) == std::optional<std::size_t>(1));

    std::vector<ConflictEntry> rated{entry("a", Fraction(1), 1, true, Fraction(4)),
                                     entry("b", Fraction(1), 2, true, Fraction(5))};
    CHECK(resolveConflicts(rated, PreferenceKind::Rating) == std::optional<std::size_t>(1));
    CHECK(resolveConflicts(rated, PreferenceKind::YesNo) == std::optional<std::size_t>(0));
}

TEST_CASE("tie-break order holds over every permutation") {
    std::vector<ConflictEntry> entries(4);
    const std::vector<std::pair<Fraction, Timestamp>> shape{{Fraction(4, 5), 9}, {Fraction(4, 5), 3},
                                                            {Fraction(3, 5), 1}, {Fraction(4, 5), 3}};
    const std::vector<std::string> ids{"d", "c", "a", "b"};
    std::vector<int> order{0, 1, 2, 3};
    do {
        for (int i = 0; i < 4; ++i) {
            entries[i].tally.proposalId = ids[order[i]];
            entries[i].tally.score = shape[order[i]].first;
            entries[i].createdAt = shape[order[i]].second;
            entries[i].met = true;
        }
        auto w = resolveConflicts(entries, PreferenceKind::YesNo);
        REQUIRE(w.has_value());
        CHECK(entries[*w].tally.proposalId == "b");
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("quorum is half of the eligible decision makers, rounded up") {
    RoundInput in;
    in.candidates = {{"p", 0, {}, false}};
    in.weights = {1, 1, 1, 1, 1};
    in.eligibleCount = 5;
    in.ballots = {{0, 0, AgreementKind::Approval, 0}, {1, 0, AgreementKind::Approval, 0}};
    CHECK(quorumDeficits(in) == std::vector<int>{0});
    try {
        aggregate(in);
        FAIL("expected QuorumNotReached");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::QuorumNotReached);
    }
    in.ballots.push_back({2, 0, AgreementKind::Reject, 0});
    CHECK(quorumDeficits(in).empty());

    in.finalDecisionMaker = 4;
    CHECK(quorumDeficits(in) == std::vector<int>{0});
    in.ballots = {{4, 0, AgreementKind::Approval, 0}};
    CHECK(quorumDeficits(in).empty());
    CHECK(aggregate(in).outcomes[0].status == CollectiveStatus::Approved);
}

TEST_CASE("parallel and serial tallies agree") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        RoundInput in;
        const int candidates = 1 + static_cast<int>(rng() % 300);
        const int voters = 1 + static_cast<int>(rng() % 12);
        for (int c = 0; c < candidates; ++c) in.candidates.push_back({"p" + std::to_string(c), c, {}, false});
        for (int v = 0; v < voters; ++v) in.weights.emplace_back(1 + static_cast<int>(rng() % 7), 1 + static_cast<int>(rng() % 4));
        in.preferenceKind = trial % 2 ? PreferenceKind::Rating : PreferenceKind::YesNo;
        for (int v = 0; v < voters; ++v)
            for (int c = 0; c < candidates; ++c)
                if (rng() % 3)
                    in.ballots.push_back({v, c, static_cast<AgreementKind>(rng() % 3),
                                          in.preferenceKind == PreferenceKind::Rating ? 1 + static_cast<int>(rng() % 5) : 0});
        std::shuffle(in.ballots.begin(), in.ballots.end(), rng);
        CHECK(tallyRound(in) == tallyRoundSerial(in));
    }
}

TEST_CASE("CMS-shaped round: conflictual alternative beats the refined proposal") {
    RoundInput in;
    in.candidates = {{"similarity", 1, {}, false}, {"dependency", 2, {2}, false}, {"induction", 3, {1}, false}};
    in.weights = {1, 1, 1, 1};
    in.eligibleCount = 4;
    in.threshold = AT::Low;
    using K = AgreementKind;
    in.ballots = {{0, 0, K::Approval, 0}, {1, 0, K::Approval, 0}, {2, 0, K::Approval, 0},
                  {0, 1, K::Approval, 0}, {1, 1, K::Refinement, 0}, {2, 1, K::Reject, 0},
                  {0, 2, K::Approval, 0}, {1, 2, K::Approval, 0}, {2, 2, K::Approval, 0}};
    auto r = aggregate(in);
    CHECK(r.converged);
    CHECK(r.outcomes[0].status == CollectiveStatus::Approved);
    CHECK(r.outcomes[1].status == CollectiveStatus::Rejected);
    CHECK(r.outcomes[1].resolution == Resolution::LostConflict);
    CHECK(r.outcomes[2].status == CollectiveStatus::Approved);
    CHECK(r.outcomes[2].resolution == Resolution::Winner);
    CHECK(r.outcomes[1].conflictSet == r.outcomes[2].conflictSet);
    CHECK(r.outcomes[0].conflictSet == -1);
}

TEST_CASE("final pass marks undecided proposals") {
    RoundInput in;
    in.candidates = {{"p", 0, {}, false}};
    in.weights = {1, 1, 1, 1, 1};
    in.eligibleCount = 5;
    in.threshold = AT::High;
    for (int v = 0; v < 5; ++v) in.ballots.push_back({v, 0, v < 3 ? AgreementKind::Approval : AgreementKind::Reject, 0});
    CHECK(aggregate(in).outcomes[0].status == CollectiveStatus::Pending);
    CHECK_FALSE(aggregate(in).converged);
    in.finalPass = true;
    in.iterationClass = IterationClass::Iterative;
    CHECK(aggregate(in).outcomes[0].status == CollectiveStatus::Unresolved);
    in.iterationClass = IterationClass::SingleElection;
    CHECK(aggregate(in).outcomes[0].status == CollectiveStatus::Rejected);
}

TEST_CASE("blocked candidates are rejected") {
    RoundInput in;
    in.candidates = {{"p", 0, {}, true}};
    in.weights = {1};
    in.eligibleCount = 1;
    in.ballots = {{0, 0, AgreementKind::Approval, 0}};
    auto r = aggregate(in);
    CHECK(r.outcomes[0].status == CollectiveStatus::Rejected);
    CHECK(r.outcomes[0].resolution == Resolution::Blocked);
    CHECK(r.converged);
}

TEST_CASE("random instances agree with the oracle, and invariants hold") {
    std::mt19937 rng(7);
    const AT thresholds[] = {AT::Low, AT::Medium, AT::High, AT::Strict};
    int compared = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        oracle::Instance inst;
        const int n = 1 + static_cast<int>(rng() % 6);
        const int m = 1 + static_cast<int>(rng() % 5);
        for (int v = 0; v < n; ++v) inst.weights.push_back(1 + static_cast<int>(rng() % 9));
        for (int p = 0; p < m; ++p) {
            inst.ids.push_back("p" + std::to_string(p));
            inst.createdAt.push_back(static_cast<Timestamp>(rng() % 3));
            inst.blocked.push_back(rng() % 10 == 0);
        }
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q)
                if (rng() % 3 == 0) inst.conflicts.push_back({p, q});
        inst.ratingMode = rng() % 3 == 0;
        inst.eligible = n;
        inst.iterative = rng() % 2;
        inst.finalPass = rng() % 2;
        for (int v = 0; v < n; ++v)
            for (int p = 0; p < m; ++p)
                if (rng() % 5) {
                    int rating = 1 + static_cast<int>(rng() % 5);
                    inst.casts.push_back({v, p, static_cast<oracle::Vote>(rng() % 3), rating});
                }
        const auto t = thresholds[rng() % 4];
        oracle::setThreshold(inst, t);
        auto expected = oracle::evaluate(inst);
        auto in = oracle::lower(inst, t);
        if (expected.quorumFailed) {
            CHECK_THROWS_AS(aggregate(in), Error);
            continue;
        }
        auto actual = aggregate(in);
        const auto diff = oracle::compare(inst, expected, actual);
        CHECK_MESSAGE(diff.empty(), "trial " << trial << ": " << diff);
        ++compared;

        // conflict exclusivity
        for (auto [a, b] : inst.conflicts)
            CHECK_FALSE((actual.outcomes[a].status == CollectiveStatus::Approved &&
                         actual.outcomes[b].status == CollectiveStatus::Approved));
    }
    CHECK(compared > 1000);
}

TEST_CASE("flipping a reject to approval never lowers the score") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::map<std::string, Fraction> w;
        std::vector<Decision> ds;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            const auto id = "v" + std::to_string(i);
            w[id] = Fraction(1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 4));
            ds.push_back(cast(id, static_cast<AgreementKind>(rng() % 3)));
        }
        const auto before = approvalScore("p", ds, w, PreferenceKind::YesNo, AT::Medium).score;
        for (auto& d : ds)
            if (d.kind == AgreementKind::Reject) {
                d.kind = AgreementKind::Approval;
                break;
            }
        CHECK(approvalScore("p", ds, w, PreferenceKind::YesNo, AT::Medium).score >= before);
    }
}
