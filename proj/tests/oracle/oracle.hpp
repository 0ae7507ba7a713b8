#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdm/aggregation.hpp"

// Brute-force round evaluator used as a reference in tests. Integer weights
// and cross-multiplication only; shares no code with the engine's tally.
namespace oracle {

enum class Vote { Approve, Reject, Refine };

struct Cast {
    int voter = 0;
    int proposal = 0;
    Vote vote = Vote::Approve;
    int rating = 0;  // rating mode: 1..5, decides the vote
};

struct Instance {
    std::vector<std::int64_t> weights;
    std::vector<std::string> ids;
    std::vector<std::int64_t> createdAt;
    std::vector<bool> blocked;
    std::vector<std::pair<int, int>> conflicts;
    std::vector<Cast> casts;
    bool ratingMode = false;
    int eligible = 0;
    std::optional<int> finalDecisionMaker;
    // threshold as num/den, plus whether it must be exceeded strictly
    std::int64_t num = 2, den = 3;
    bool strictlyAbove = false;
    bool iterative = false;
    bool finalPass = false;
};

enum class Status { Pending, Approved, Rejected, Unresolved };
enum class How { None, Winner, Lost, Blocked };

struct Verdict {
    bool voted = false;
    std::int64_t approve = 0, total = 0;
    bool met = false;
    Status status = Status::Pending;
    How how = How::None;
    int set = -1;
};

struct Result {
    bool quorumFailed = false;
    bool converged = true;
    std::vector<Verdict> verdicts;
};

Result evaluate(const Instance& in);

// Threshold lookup for the default mapping (low 1/2 exclusive, 2/3, 4/5, 1).
void setThreshold(Instance& in, gdm::AgreementThreshold t);

// Builds the engine's index model for the same instance.
gdm::RoundInput lower(const Instance& in, gdm::AgreementThreshold t);

// Empty when equal, else a description of the first difference.
std::string compare(const Instance& in, const Result& expected, const gdm::RoundResult& actual);

}  // namespace oracle
