#include "hwfmine/discovery.hpp"

#include "hwfmine/errors.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace hwfmine {

DirectlyFollowsGraph build_dfg(const EventLog& log) {
    DirectlyFollowsGraph dfg;
    for (const auto& [trace, count] : log.traces()) {
        for (const auto& a : trace) dfg.nodes.insert(a);
        if (!trace.empty()) {
            dfg.start_activities[trace.front()] += count;
            dfg.end_activities[trace.back()] += count;
        }
        for (std::size_t i = 0; i + 1 < trace.size(); ++i)
            dfg.edges[{trace[i], trace[i + 1]}] += count;
    }
    return dfg;
}

ProcessTree ProcessTree::leaf(Activity a) {
    ProcessTree t;
    t.op = TreeOp::activity;
    t.activity = std::move(a);
    return t;
}

ProcessTree ProcessTree::tau() {
    return {};
}

ProcessTree ProcessTree::node(TreeOp op, std::vector<ProcessTree> children) {
    ProcessTree t;
    t.op = op;
    t.children = std::move(children);
    return t;
}

std::string ProcessTree::to_string() const {
    switch (op) {
    case TreeOp::activity: return activity;
    case TreeOp::silent: return "tau";
    default: break;
    }
    const char* name = "";
    switch (op) {
    case TreeOp::sequence: name = "seq"; break;
    case TreeOp::exclusive: name = "xor"; break;
    case TreeOp::parallel: name = "par"; break;
    case TreeOp::loop: name = "loop"; break;
    default: break;
    }
    std::ostringstream out;
    out << name << "(";
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) out << ", ";
        out << children[i].to_string();
    }
    out << ")";
    return out.str();
}

namespace {

using Component = std::set<Activity>;

// Activities are mapped onto indices to run graph algorithms; the order of a
// std::set keeps everything deterministic.
struct IndexedDfg {
    std::vector<Activity> activities;
    std::map<Activity, std::size_t> index;
    std::vector<std::vector<bool>> edge;  // directed adjacency
    std::vector<bool> is_start, is_end;

    explicit IndexedDfg(const DirectlyFollowsGraph& dfg) {
        activities.assign(dfg.nodes.begin(), dfg.nodes.end());
        for (std::size_t i = 0; i < activities.size(); ++i) index[activities[i]] = i;
        const std::size_t n = activities.size();
        edge.assign(n, std::vector<bool>(n, false));
        is_start.assign(n, false);
        is_end.assign(n, false);
        for (const auto& [pair, count] : dfg.edges) edge[index.at(pair.first)][index.at(pair.second)] = true;
        for (const auto& [a, count] : dfg.start_activities) is_start[index.at(a)] = true;
        for (const auto& [a, count] : dfg.end_activities) is_end[index.at(a)] = true;
    }

    std::size_t size() const { return activities.size(); }
};

// Connected components of the undirected version of the DFG.
std::vector<Component> undirected_components(const IndexedDfg& dfg) {
    const std::size_t n = dfg.size();
    std::vector<std::size_t> component(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (component[i] != n) continue;
        std::vector<std::size_t> stack{i};
        component[i] = next;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                if (component[v] == n && (dfg.edge[u][v] || dfg.edge[v][u])) {
                    component[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    std::vector<Component> result(next);
    for (std::size_t i = 0; i < n; ++i) result[component[i]].insert(dfg.activities[i]);
    std::sort(result.begin(), result.end());
    return result;
}

// Transitive closure of the directed DFG (Floyd-Warshall on booleans).
std::vector<std::vector<bool>> reachability(const IndexedDfg& dfg) {
    auto reach = dfg.edge;
    const std::size_t n = dfg.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    return reach;
}

std::vector<Component> detect_exclusive_cut(const IndexedDfg& dfg) {
    auto components = undirected_components(dfg);
    if (components.size() < 2) return {};
    return components;
}

// Sequence cut: start from the strongly connected components, merge pairs
// that are mutually unreachable, and order the survivors by reachability.
std::vector<Component> detect_sequence_cut(const IndexedDfg& dfg) {
    const std::size_t n = dfg.size();
    const auto reach = reachability(dfg);

    std::vector<std::size_t> group(n);
    for (std::size_t i = 0; i < n; ++i) group[i] = i;
    auto merge = [&](std::size_t a, std::size_t b) {
        const std::size_t from = group[b], to = group[a];
        for (std::size_t i = 0; i < n; ++i)
            if (group[i] == from) group[i] = to;
    };

    // Mutually reachable activities belong to the same group.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (reach[i][j] && reach[j][i] && group[i] != group[j]) merge(i, j);

    // Group-level reachability, refreshed after each merge of incomparables.
    bool changed = true;
    while (changed) {
        changed = false;
        auto group_reaches = [&](std::size_t ga, std::size_t gb) {
            for (std::size_t i = 0; i < n; ++i)
                if (group[i] == ga)
                    for (std::size_t j = 0; j < n; ++j)
                        if (group[j] == gb && reach[i][j]) return true;
            return false;
        };
        for (std::size_t i = 0; i < n && !changed; ++i) {
            for (std::size_t j = i + 1; j < n && !changed; ++j) {
                if (group[i] == group[j]) continue;
                if (!group_reaches(group[i], group[j]) && !group_reaches(group[j], group[i])) {
                    merge(i, j);
                    changed = true;
                }
            }
        }
    }

    std::set<std::size_t> distinct(group.begin(), group.end());
    if (distinct.size() < 2) return {};

    // Total order: a group precedes everything it reaches.
    std::vector<std::size_t> order(distinct.begin(), distinct.end());
    std::sort(order.begin(), order.end(), [&](std::size_t ga, std::size_t gb) {
        for (std::size_t i = 0; i < n; ++i)
            if (group[i] == ga)
                for (std::size_t j = 0; j < n; ++j)
                    if (group[j] == gb && reach[i][j]) return true;
        return false;
    });

    std::vector<Component> result;
    for (std::size_t g : order) {
        Component c;
        for (std::size_t i = 0; i < n; ++i)
            if (group[i] == g) c.insert(dfg.activities[i]);
        result.push_back(std::move(c));
    }
    return result;
}

// Parallel cut: components of the "not mutually connected" graph, each of
// which must contain a start and an end activity.
std::vector<Component> detect_parallel_cut(const IndexedDfg& dfg) {
    const std::size_t n = dfg.size();
    if (n < 2) return {};
    std::vector<std::size_t> component(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (component[i] != n) continue;
        std::vector<std::size_t> stack{i};
        component[i] = next;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                if (v == u || component[v] != n) continue;
                if (!(dfg.edge[u][v] && dfg.edge[v][u])) { // pair not fully concurrent
                    component[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    if (next < 2) return {};
    std::vector<Component> result(next);
    std::vector<bool> has_start(next, false), has_end(next, false);
    for (std::size_t i = 0; i < n; ++i) {
        result[component[i]].insert(dfg.activities[i]);
        if (dfg.is_start[i]) has_start[component[i]] = true;
        if (dfg.is_end[i]) has_end[component[i]] = true;
    }
    for (std::size_t c = 0; c < next; ++c)
        if (!has_start[c] || !has_end[c]) return {};
    std::sort(result.begin(), result.end());
    return result;
}

// Loop cut: body = start/end activities plus everything whose boundary arcs
// do not respect the redo discipline; remaining components are redo parts.
std::vector<Component> detect_loop_cut(const IndexedDfg& dfg) {
    const std::size_t n = dfg.size();
    std::vector<bool> in_body(n, false);
    for (std::size_t i = 0; i < n; ++i)
        if (dfg.is_start[i] || dfg.is_end[i]) in_body[i] = true;

    // A start activity that is also directly reachable from outside the body
    // boundary rules below still works; conditions are re-checked on merge.
    bool changed = true;
    std::vector<std::size_t> component(n);
    std::size_t component_count = 0;
    while (changed) {
        changed = false;

        // Undirected components of the non-body part.
        std::fill(component.begin(), component.end(), n);
        component_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (in_body[i] || component[i] != n) continue;
            std::vector<std::size_t> stack{i};
            component[i] = component_count;
            while (!stack.empty()) {
                const std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t v = 0; v < n; ++v) {
                    if (in_body[v] || component[v] != n) continue;
                    if (dfg.edge[u][v] || dfg.edge[v][u]) {
                        component[v] = component_count;
                        stack.push_back(v);
                    }
                }
            }
            ++component_count;
        }
        if (component_count == 0) return {};

        // Arcs from the body into a redo part must leave from end
        // activities; arcs back into the body must enter at start
        // activities. Violating components are folded into the body.
        std::vector<bool> bad(component_count, false);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                if (!dfg.edge[u][v]) continue;
                if (in_body[u] && !in_body[v] && !dfg.is_end[u]) bad[component[v]] = true;
                if (!in_body[u] && in_body[v] && !dfg.is_start[v]) bad[component[u]] = true;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_body[i] && bad[component[i]]) {
                in_body[i] = true;
                changed = true;
            }
        }
    }

    std::vector<Component> redos(component_count);
    for (std::size_t i = 0; i < n; ++i)
        if (!in_body[i]) redos[component[i]].insert(dfg.activities[i]);
    redos.erase(std::remove_if(redos.begin(), redos.end(),
                               [](const Component& c) { return c.empty(); }),
                redos.end());
    if (redos.empty()) return {};

    Component body;
    for (std::size_t i = 0; i < n; ++i)
        if (in_body[i]) body.insert(dfg.activities[i]);
    if (body.empty()) return {};

    std::sort(redos.begin(), redos.end());
    std::vector<Component> result{std::move(body)};
    result.insert(result.end(), redos.begin(), redos.end());
    return result;
}

std::size_t component_of(const std::vector<Component>& components, const Activity& a) {
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].count(a)) return i;
    throw error("internal: activity '" + a + "' missing from cut components");
}

std::vector<EventLog> split_exclusive(const EventLog& log, const std::vector<Component>& parts) {
    std::vector<EventLog> sublogs(parts.size());
    for (const auto& [trace, count] : log.traces()) {
        // All activities of a trace share one undirected component.
        sublogs[component_of(parts, trace.front())].add(trace, count);
    }
    return sublogs;
}

std::vector<EventLog> split_sequence(const EventLog& log, const std::vector<Component>& parts) {
    std::vector<EventLog> sublogs(parts.size());
    for (const auto& [trace, count] : log.traces()) {
        std::vector<Trace> pieces(parts.size());
        std::size_t current = 0;
        for (const auto& a : trace) {
            const std::size_t part = component_of(parts, a);
            if (part < current)
                throw error("internal: sequence cut does not order the trace");
            current = part;
            pieces[part].push_back(a);
        }
        for (std::size_t i = 0; i < parts.size(); ++i) sublogs[i].add(std::move(pieces[i]), count);
    }
    return sublogs;
}

std::vector<EventLog> split_parallel(const EventLog& log, const std::vector<Component>& parts) {
    std::vector<EventLog> sublogs(parts.size());
    for (const auto& [trace, count] : log.traces())
        for (std::size_t i = 0; i < parts.size(); ++i)
            sublogs[i].add(project(trace, parts[i]), count);
    return sublogs;
}

// Cuts every trace into maximal segments alternating between the body and a
// single redo part; the first and last segment always belong to the body.
std::vector<EventLog> split_loop(const EventLog& log, const std::vector<Component>& parts) {
    std::vector<EventLog> sublogs(parts.size());
    for (const auto& [trace, count] : log.traces()) {
        Trace segment;
        std::size_t segment_part = 0;
        bool last_was_body = false;
        for (const auto& a : trace) {
            const std::size_t part = component_of(parts, a);
            if (segment.empty()) {
                segment_part = part;
            } else if (part != segment_part) {
                sublogs[segment_part].add(std::move(segment), count);
                segment = {};
                segment_part = part;
            }
            segment.push_back(a);
            last_was_body = (part == 0);
        }
        if (!segment.empty()) sublogs[segment_part].add(std::move(segment), count);
        if (!trace.empty() && !last_was_body)
            throw error("internal: loop cut trace does not end in the body");
    }
    return sublogs;
}

ProcessTree flower(const std::set<Activity>& alphabet) {
    std::vector<ProcessTree> children{ProcessTree::tau()};
    for (const auto& a : alphabet) children.push_back(ProcessTree::leaf(a));
    return ProcessTree::node(TreeOp::loop, std::move(children));
}

ProcessTree discover(const EventLog& log) {
    if (log.empty()) return ProcessTree::tau();

    // Split off empty traces as an exclusive τ option.
    bool has_empty = false, has_nonempty = false;
    for (const auto& [trace, count] : log.traces())
        (trace.empty() ? has_empty : has_nonempty) = true;
    if (has_empty && !has_nonempty) return ProcessTree::tau();
    if (has_empty) {
        EventLog rest;
        for (const auto& [trace, count] : log.traces())
            if (!trace.empty()) rest.add(trace, count);
        return ProcessTree::node(TreeOp::exclusive, {ProcessTree::tau(), discover(rest)});
    }

    const auto alphabet = log.alphabet();
    if (alphabet.size() == 1) {
        const Activity& a = *alphabet.begin();
        bool all_single = true;
        for (const auto& [trace, count] : log.traces())
            if (trace.size() != 1) all_single = false;
        if (all_single) return ProcessTree::leaf(a);
        // Traces are non-empty runs of a single activity.
        return ProcessTree::node(TreeOp::loop, {ProcessTree::leaf(a), ProcessTree::tau()});
    }

    const IndexedDfg dfg(build_dfg(log));

    if (auto parts = detect_exclusive_cut(dfg); !parts.empty()) {
        auto sublogs = split_exclusive(log, parts);
        std::vector<ProcessTree> children;
        for (const auto& sublog : sublogs) children.push_back(discover(sublog));
        return ProcessTree::node(TreeOp::exclusive, std::move(children));
    }
    if (auto parts = detect_sequence_cut(dfg); !parts.empty()) {
        auto sublogs = split_sequence(log, parts);
        std::vector<ProcessTree> children;
        for (const auto& sublog : sublogs) children.push_back(discover(sublog));
        return ProcessTree::node(TreeOp::sequence, std::move(children));
    }
    if (auto parts = detect_parallel_cut(dfg); !parts.empty()) {
        auto sublogs = split_parallel(log, parts);
        std::vector<ProcessTree> children;
        for (const auto& sublog : sublogs) children.push_back(discover(sublog));
        return ProcessTree::node(TreeOp::parallel, std::move(children));
    }
    if (auto parts = detect_loop_cut(dfg); !parts.empty()) {
        auto sublogs = split_loop(log, parts);
        std::vector<ProcessTree> children;
        for (const auto& sublog : sublogs) children.push_back(discover(sublog));
        return ProcessTree::node(TreeOp::loop, std::move(children));
    }

    return flower(alphabet);
}

} // namespace

ProcessTree inductive_discover(const EventLog& log) {
    if (log.empty()) throw input_error("inductive_discover: empty log");
    return discover(log);
}

namespace {

// Builds the fragment for `tree` consuming one token from `entry` and
// producing one on `exit`.
void build_fragment(const ProcessTree& tree, LabeledPetriNet& net, PlaceId entry, PlaceId exit) {
    switch (tree.op) {
    case TreeOp::activity: {
        const TransitionId t = net.add_transition(tree.activity);
        net.add_input_arc(entry, t);
        net.add_output_arc(t, exit);
        return;
    }
    case TreeOp::silent: {
        const TransitionId t = net.add_transition(std::nullopt);
        net.add_input_arc(entry, t);
        net.add_output_arc(t, exit);
        return;
    }
    case TreeOp::sequence: {
        PlaceId current = entry;
        for (std::size_t i = 0; i < tree.children.size(); ++i) {
            const PlaceId next = (i + 1 == tree.children.size()) ? exit : net.add_place();
            build_fragment(tree.children[i], net, current, next);
            current = next;
        }
        if (tree.children.empty()) {
            const TransitionId t = net.add_transition(std::nullopt);
            net.add_input_arc(entry, t);
            net.add_output_arc(t, exit);
        }
        return;
    }
    case TreeOp::exclusive: {
        for (const auto& child : tree.children) build_fragment(child, net, entry, exit);
        return;
    }
    case TreeOp::parallel: {
        const TransitionId split = net.add_transition(std::nullopt);
        const TransitionId join = net.add_transition(std::nullopt);
        net.add_input_arc(entry, split);
        net.add_output_arc(join, exit);
        for (const auto& child : tree.children) {
            const PlaceId in = net.add_place();
            const PlaceId out = net.add_place();
            net.add_output_arc(split, in);
            net.add_input_arc(out, join);
            build_fragment(child, net, in, out);
        }
        return;
    }
    case TreeOp::loop: {
        // Dedicated loop places keep redo tokens away from surrounding
        // exclusive-choice structure.
        const PlaceId in = net.add_place();
        const PlaceId out = net.add_place();
        const TransitionId enter = net.add_transition(std::nullopt);
        const TransitionId leave = net.add_transition(std::nullopt);
        net.add_input_arc(entry, enter);
        net.add_output_arc(enter, in);
        net.add_input_arc(out, leave);
        net.add_output_arc(leave, exit);
        build_fragment(tree.children.empty() ? ProcessTree::tau() : tree.children[0], net, in,
                       out);
        for (std::size_t i = 1; i < tree.children.size(); ++i)
            build_fragment(tree.children[i], net, out, in);
        if (tree.children.size() == 1) {
            const TransitionId redo = net.add_transition(std::nullopt);
            net.add_input_arc(out, redo);
            net.add_output_arc(redo, in);
        }
        return;
    }
    }
    throw error("internal: unknown process-tree node");
}

} // namespace

WFNet tree_to_wfnet(const ProcessTree& tree) {
    WFNet result;
    result.source = result.net.add_place("source");
    result.sink = result.net.add_place("sink");
    build_fragment(tree, result.net, result.source, result.sink);
    return result;
}

WFNet InductiveDiscoverer::discover(const EventLog& log) const {
    return discover_flat(log);
}

WFNet discover_flat(const EventLog& log) {
    if (log.empty()) throw input_error("discover_flat: empty log");
    return tree_to_wfnet(inductive_discover(log));
}

} // namespace hwfmine
