#pragma once

#include "hwfmine/eventlog.hpp"
#include "hwfmine/petri.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hwfmine {

enum class Fit { yes, no, inconclusive };

/// True iff sigma is a run of w from [i] to [f], with silent transitions
/// free. Exceeding the search budget yields `inconclusive`.
Fit perfectly_fits(const WFNet& w, const Trace& sigma, std::size_t state_budget);

struct AlignmentMove {
    enum class Kind { synchronous, model, log };
    Kind kind;
    std::optional<Activity> activity; // empty for silent model moves
    std::string transition_id;        // empty for log moves
};

/// Minimal-cost pairing of a trace with a complete model run. Unit cost for
/// log moves and visible model moves; synchronous and silent moves are free.
struct Alignment {
    std::vector<AlignmentMove> moves;
    std::uint64_t cost = 0;
    bool complete = true; // false when the search budget ran out

    /// The model run of the alignment: visible model and synchronous moves.
    Trace model_trace() const;
};

/// Optimal alignment via uniform-cost search over the synchronous product.
/// Throws input_error when the net has no complete run at all.
Alignment align(const WFNet& w, const Trace& sigma, std::size_t state_budget);

/// Cost of the cheapest model-only complete run (number of visible firings).
std::uint64_t min_model_cost(const WFNet& w, std::size_t state_budget);

struct TraceConformance {
    Trace trace;
    EventLog::Count count = 1;
    std::uint64_t cost = 0;
    double fitness = 1.0;
    bool aligned = true; // false when the budget ran out for this trace
};

struct FitnessResult {
    double fitness = 1.0;
    bool partial = false; // some trace could not be aligned within budget
    std::vector<TraceConformance> traces;
};

/// Multiplicity-weighted average of per-trace alignment fitness
/// 1 - cost / (|sigma| + c_min). Throws input_error on an empty log.
FitnessResult alignment_fitness(const WFNet& w, const EventLog& log, std::size_t state_budget);

/// Fast produced/consumed/missing/remaining approximation of fitness.
double token_replay_fitness(const WFNet& w, const EventLog& log, std::size_t state_budget);

/// Escaping-edges precision on the aligned log: at every prefix state of the
/// log, activities the model enables (silent-closed) but the log never takes
/// count as escaping. Throws input_error on an empty log.
double etc_precision(const WFNet& w, const EventLog& log, std::size_t state_budget);

struct ConformanceReport {
    double fitness = 1.0;
    double precision = 1.0;
    bool partial = false;
    std::vector<TraceConformance> traces;
};

ConformanceReport conformance_report(const WFNet& w, const EventLog& log,
                                     std::size_t state_budget);

std::string to_json(const ConformanceReport& report);

} // namespace hwfmine
