#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hwfmine {

/// An activity is an opaque event name. Comparisons are byte-exact.
using Activity = std::string;

/// One case: an ordered, possibly empty sequence of activities.
using Trace = std::vector<Activity>;

/// A finite multiset of traces.
class EventLog {
public:
    using Count = std::uint64_t;
    using Map = std::map<Trace, Count>;

    EventLog() = default;

    void add(Trace trace, Count multiplicity = 1);

    const Map& traces() const { return traces_; }
    bool empty() const { return traces_.empty(); }

    /// Number of trace instances (multiplicities summed).
    Count size() const;
    /// Number of distinct trace variants.
    std::size_t variant_count() const { return traces_.size(); }
    /// Total number of events across all trace instances.
    Count event_count() const;

    /// Union of activities occurring in any trace.
    std::set<Activity> alphabet() const;

    bool operator==(const EventLog&) const = default;

private:
    Map traces_;
};

/// Deletes all events of sigma that are not in q, preserving order.
Trace project(const Trace& sigma, const std::set<Activity>& q);

/// Per-trace projection of a whole log; projections that coincide accumulate
/// multiplicity.
EventLog project_log(const EventLog& log, const std::set<Activity>& q);

/// Collapses each maximal run of equal adjacent events to a single event.
Trace remove_stuttering(const Trace& sigma);

/// Result of validating a partition against a log alphabet.
struct PartitionReport {
    struct Overlap {
        Activity activity;
        std::string first_group;
        std::string second_group;
    };
    std::vector<Overlap> overlaps;
    std::vector<Activity> uncovered;

    bool ok() const { return overlaps.empty() && uncovered.empty(); }
    std::string describe() const;
};

/// Per-group refinement hint for a loop alphabet that straddles the group.
struct RefinementHint {
    std::string group;
    std::set<Activity> inside;  // group ∩ loop alphabet
    std::set<Activity> outside; // group ∖ loop alphabet
};

struct LoopCompatibility {
    std::vector<RefinementHint> hints;

    bool ok() const { return hints.empty(); }
    std::string describe() const;
};

/// Maps each sub-process name to its non-empty, pairwise disjoint set of
/// low-level activities.
class Partition {
public:
    using Groups = std::map<std::string, std::set<Activity>>;

    Partition() = default;
    explicit Partition(Groups groups) : groups_(std::move(groups)) {}

    void add_group(const std::string& name, std::set<Activity> activities);
    void add_to_group(const std::string& name, const Activity& activity);

    const Groups& groups() const { return groups_; }
    bool has_group(const std::string& name) const { return groups_.count(name) != 0; }

    /// Name of the group containing the activity, or empty if uncovered.
    /// With overlapping groups the lexicographically first match wins;
    /// validate() rejects such partitions up front.
    std::string group_of(const Activity& activity) const;

    /// Checks disjointness and coverage of the log alphabet.
    PartitionReport validate(const EventLog& log) const;

    /// Checks the loop-compatibility requirement for a detected loop-body
    /// alphabet: each group must be disjoint from it, contained in it, or
    /// contain it. Violations come back as split suggestions.
    LoopCompatibility loop_compatibility(const std::set<Activity>& loop_alphabet) const;

private:
    Groups groups_;
};

} // namespace hwfmine
