#pragma once

#include "hwfmine/eventlog.hpp"
#include "hwfmine/petri.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace hwfmine {

/// Directly-follows relation of a log, with start/end activity counts.
struct DirectlyFollowsGraph {
    std::set<Activity> nodes;
    std::map<std::pair<Activity, Activity>, std::uint64_t> edges;
    std::map<Activity, std::uint64_t> start_activities;
    std::map<Activity, std::uint64_t> end_activities;

    bool has_edge(const Activity& from, const Activity& to) const {
        return edges.count({from, to}) != 0;
    }
};

DirectlyFollowsGraph build_dfg(const EventLog& log);

enum class TreeOp { activity, silent, sequence, exclusive, parallel, loop };

/// Block-structured process model. Loop nodes have the body first, then one
/// or more redo children.
struct ProcessTree {
    TreeOp op = TreeOp::silent;
    Activity activity;                // for op == activity
    std::vector<ProcessTree> children;

    static ProcessTree leaf(Activity a);
    static ProcessTree tau();
    static ProcessTree node(TreeOp op, std::vector<ProcessTree> children);

    /// Debug form: seq(a, xor(b, tau), par(c, d), loop(e, f)).
    std::string to_string() const;

    bool operator==(const ProcessTree&) const = default;
};

/// Inductive-style discovery: recursive cut detection (exclusive, sequence,
/// parallel, loop — first match wins) with a flower-model fallthrough, so the
/// result always fits the input log.
ProcessTree inductive_discover(const EventLog& log);

/// Standard compositional translation; the output is a sound WF-net.
WFNet tree_to_wfnet(const ProcessTree& tree);

/// A flat discovery algorithm whose output must perfectly fit its input.
class Discoverer {
public:
    virtual ~Discoverer() = default;
    virtual WFNet discover(const EventLog& log) const = 0;
};

class InductiveDiscoverer final : public Discoverer {
public:
    WFNet discover(const EventLog& log) const override;
};

/// tree_to_wfnet(inductive_discover(log)). Throws input_error on empty logs.
WFNet discover_flat(const EventLog& log);

} // namespace hwfmine
