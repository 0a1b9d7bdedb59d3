#pragma once

#include "hwfmine/discovery.hpp"
#include "hwfmine/eventlog.hpp"
#include "hwfmine/hierarchy.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hwfmine {

/// Replaces every event by its sub-process name and removes stuttering.
/// Throws input_error when an activity is not covered by the partition.
EventLog lift_log(const EventLog& log, const Partition& partition);

/// All single-occurrence variants of a lifted trace: one kept occurrence per
/// activity, every combination, stutter-removed and deduplicated. Throws
/// budget_error when the combination count exceeds `cap`.
std::set<Trace> clone_traces(const Trace& sigma, std::size_t cap = 4096);

/// clone_traces applied to every trace; each clone inherits the multiplicity
/// of its origin.
EventLog clone_log(const EventLog& log, std::size_t cap = 4096);

/// Acyclic high-level discovery: lift, clone, then run the flat discoverer.
/// The caller is responsible for the log being free of repetitive behavior.
WFNet discover_highlevel_acyclic(const EventLog& log, const Partition& partition,
                                 const Discoverer& discoverer, std::size_t clone_cap = 4096);

/// Alphabet of an innermost elementary repetitive component: maximal tandem
/// repeats are collected per trace, their alphabets merged when they overlap
/// without nesting, and a minimal component (lexicographically smallest on
/// ties) is returned. No tandem repeat anywhere yields nullopt.
std::optional<std::set<Activity>> find_inner_loop_alphabet(const EventLog& log);

/// Replaces every occurrence of an activity from `body` by `beta` and
/// removes stuttering, per trace.
EventLog fold_loop(const EventLog& log, const std::set<Activity>& body, const Activity& beta);

struct LoopInfo {
    std::string name;                // fresh __loop_k activity
    std::set<Activity> alphabet;     // component alphabet at detection time
    std::string joined_group;        // group the name joined; empty for a new group
    bool retired = false;            // substituted into an enclosing loop body
};

/// Working state of the loop-processing iteration: fresh loop names in
/// creation order, each mapped to the WF-net of its body.
struct LoopRegistry {
    struct Entry {
        LoopInfo info;
        WFNet body;
    };
    std::vector<Entry> entries; // creation order

    Entry* find_active(const std::string& name);
};

struct HwfDiscoveryOptions {
    std::size_t clone_cap = 4096;
};

struct HwfDiscovery {
    HWFNet hwf;              // final two-level model
    WFNet high_raw;          // high-level net as discovered, before loop substitution
    EventLog lifted_log;     // input log lifted with the original partition
    EventLog folded_log;     // low-level log after all loop folding
    EventLog processed_log;  // folded, lifted and cloned: the high-level event log
    LoopRegistry registry;   // all loops, including retired inner ones
    std::vector<EventLog> folds; // folded low-level log after each iteration
};

/// Full hierarchical discovery: repeatedly detect an inner loop body, model
/// it, fold it into a fresh name, then discover the loop-free high-level net
/// and all sub-process nets, and finally substitute the loop bodies back in.
/// Throws partition_error when the partition is invalid or a detected loop
/// body straddles a sub-process (the message carries the refinement hint).
HwfDiscovery discover_hwf(const EventLog& log, const Partition& partition,
                          const Discoverer& discoverer, const HwfDiscoveryOptions& options = {});

} // namespace hwfmine
