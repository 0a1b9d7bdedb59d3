#include "hwfmine/petri.hpp"

#include "hwfmine/errors.hpp"

#include <algorithm>
#include <deque>
#include <random>

namespace hwfmine {

std::uint64_t Marking::total_tokens() const {
    std::uint64_t total = 0;
    for (auto n : tokens_) total += n;
    return total;
}

bool Marking::subset_of(const Marking& other) const {
    for (std::size_t p = 0; p < tokens_.size(); ++p)
        if (tokens_[p] > other.tokens_[p]) return false;
    return true;
}

PlaceId LabeledPetriNet::add_place(std::string id) {
    const PlaceId p = places_.size();
    if (id.empty()) id = "p" + std::to_string(p);
    places_.push_back({std::move(id)});
    return p;
}

TransitionId LabeledPetriNet::add_transition(std::optional<Activity> label, std::string id) {
    const TransitionId t = transitions_.size();
    if (id.empty()) id = "t" + std::to_string(t);
    transitions_.push_back({std::move(id), std::move(label)});
    inputs_.emplace_back();
    outputs_.emplace_back();
    return t;
}

void LabeledPetriNet::add_input_arc(PlaceId p, TransitionId t, std::uint32_t weight) {
    for (auto& arc : inputs_[t]) {
        if (arc.place == p) {
            arc.weight += weight;
            return;
        }
    }
    inputs_[t].push_back({p, weight});
}

void LabeledPetriNet::add_output_arc(TransitionId t, PlaceId p, std::uint32_t weight) {
    for (auto& arc : outputs_[t]) {
        if (arc.place == p) {
            arc.weight += weight;
            return;
        }
    }
    outputs_[t].push_back({p, weight});
}

std::set<Activity> LabeledPetriNet::label_alphabet() const {
    std::set<Activity> result;
    for (const auto& t : transitions_)
        if (t.label) result.insert(*t.label);
    return result;
}

Marking WFNet::initial_marking() const {
    Marking m(net.place_count());
    m[source] = 1;
    return m;
}

Marking WFNet::final_marking() const {
    Marking m(net.place_count());
    m[sink] = 1;
    return m;
}

std::optional<std::string> WFNet::structural_violation() const {
    if (net.place_count() == 0) return "net has no places";
    if (source == sink) return "source and sink must be distinct places";

    for (TransitionId t = 0; t < net.transition_count(); ++t) {
        for (const auto& arc : net.outputs(t))
            if (arc.place == source)
                return "source place has an incoming arc from transition " + net.transition(t).id;
        for (const auto& arc : net.inputs(t))
            if (arc.place == sink)
                return "sink place has an outgoing arc to transition " + net.transition(t).id;
    }

    // Node k in [0, P) is a place, [P, P+T) a transition.
    const std::size_t place_count = net.place_count();
    const std::size_t node_count = place_count + net.transition_count();
    std::vector<std::vector<std::size_t>> forward(node_count), backward(node_count);
    for (TransitionId t = 0; t < net.transition_count(); ++t) {
        const std::size_t tn = place_count + t;
        for (const auto& arc : net.inputs(t)) {
            forward[arc.place].push_back(tn);
            backward[tn].push_back(arc.place);
        }
        for (const auto& arc : net.outputs(t)) {
            forward[tn].push_back(arc.place);
            backward[arc.place].push_back(tn);
        }
    }

    auto reach = [&](std::size_t start, const std::vector<std::vector<std::size_t>>& edges) {
        std::vector<bool> seen(node_count, false);
        std::deque<std::size_t> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            const std::size_t node = queue.front();
            queue.pop_front();
            for (std::size_t next : edges[node]) {
                if (!seen[next]) {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        return seen;
    };

    const auto from_source = reach(source, forward);
    const auto to_sink = reach(sink, backward);
    for (std::size_t node = 0; node < node_count; ++node) {
        if (from_source[node] && to_sink[node]) continue;
        if (node < place_count)
            return "place " + net.place(node).id + " is not on a path from source to sink";
        return "transition " + net.transition(node - place_count).id +
               " is not on a path from source to sink";
    }
    return std::nullopt;
}

bool is_enabled(const LabeledPetriNet& net, const Marking& m, TransitionId t) {
    for (const auto& arc : net.inputs(t))
        if (m[arc.place] < arc.weight) return false;
    return true;
}

std::vector<TransitionId> enabled(const LabeledPetriNet& net, const Marking& m) {
    std::vector<TransitionId> result;
    for (TransitionId t = 0; t < net.transition_count(); ++t)
        if (is_enabled(net, m, t)) result.push_back(t);
    return result;
}

Marking fire(const LabeledPetriNet& net, const Marking& m, TransitionId t) {
    if (!is_enabled(net, m, t))
        throw error("fire: transition " + net.transition(t).id + " is not enabled");
    Marking next = m;
    for (const auto& arc : net.inputs(t)) next[arc.place] -= arc.weight;
    for (const auto& arc : net.outputs(t)) next[arc.place] += arc.weight;
    return next;
}

ReachabilityResult reachable_markings(const LabeledPetriNet& net, const Marking& m0,
                                      std::size_t state_budget) {
    ReachabilityResult result;
    std::set<Marking> seen{m0};
    std::deque<Marking> queue{m0};
    result.markings.push_back(m0);
    while (!queue.empty()) {
        if (result.markings.size() > state_budget) {
            result.truncated = true;
            break;
        }
        const Marking m = queue.front();
        queue.pop_front();
        for (TransitionId t : enabled(net, m)) {
            Marking next = fire(net, m, t);
            if (seen.insert(next).second) {
                result.markings.push_back(next);
                queue.push_back(std::move(next));
            }
        }
    }
    return result;
}

namespace {

// Explicit reachability graph: nodes are markings, edges remember which
// transition fired.
struct StateGraph {
    std::vector<Marking> nodes;
    std::map<Marking, std::size_t> index;
    std::vector<std::vector<std::pair<TransitionId, std::size_t>>> edges;
    bool truncated = false;
};

StateGraph explore(const LabeledPetriNet& net, const Marking& m0, std::size_t state_budget) {
    StateGraph graph;
    graph.nodes.push_back(m0);
    graph.index.emplace(m0, 0);
    graph.edges.emplace_back();
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        const std::size_t node = queue.front();
        queue.pop_front();
        const Marking current = graph.nodes[node];
        for (TransitionId t : enabled(net, current)) {
            Marking next = fire(net, current, t);
            auto [it, inserted] = graph.index.emplace(next, graph.nodes.size());
            if (inserted) {
                if (graph.nodes.size() >= state_budget) {
                    graph.truncated = true;
                    return graph;
                }
                graph.nodes.push_back(std::move(next));
                graph.edges.emplace_back();
                queue.push_back(it->second);
            }
            graph.edges[node].emplace_back(t, it->second);
        }
    }
    return graph;
}

} // namespace

SoundnessResult check_soundness(const WFNet& w, std::size_t state_budget) {
    if (auto violation = w.structural_violation())
        return {Soundness::violation, "not a WF-net: " + *violation};

    const StateGraph graph = explore(w.net, w.initial_marking(), state_budget);
    if (graph.truncated)
        return {Soundness::inconclusive,
                "state budget of " + std::to_string(state_budget) + " markings exhausted"};

    const Marking final = w.final_marking();

    // Proper completion: a marking covering [f] must be exactly [f].
    for (const auto& m : graph.nodes) {
        if (m[w.sink] >= 1 && m != final)
            return {Soundness::violation,
                    "improper completion: marking with token on sink is not the final marking"};
    }

    // Option to complete: [f] must be backward-reachable from every node.
    const auto final_it = graph.index.find(final);
    if (final_it == graph.index.end())
        return {Soundness::violation, "final marking is unreachable"};
    std::vector<std::vector<std::size_t>> reverse(graph.nodes.size());
    for (std::size_t node = 0; node < graph.nodes.size(); ++node)
        for (const auto& [t, target] : graph.edges[node]) reverse[target].push_back(node);
    std::vector<bool> can_finish(graph.nodes.size(), false);
    std::deque<std::size_t> queue{final_it->second};
    can_finish[final_it->second] = true;
    while (!queue.empty()) {
        const std::size_t node = queue.front();
        queue.pop_front();
        for (std::size_t prev : reverse[node]) {
            if (!can_finish[prev]) {
                can_finish[prev] = true;
                queue.push_back(prev);
            }
        }
    }
    for (std::size_t node = 0; node < graph.nodes.size(); ++node)
        if (!can_finish[node])
            return {Soundness::violation,
                    "option to complete violated: a reachable marking cannot reach the final "
                    "marking"};

    // No dead transitions.
    std::vector<bool> fired(w.net.transition_count(), false);
    for (const auto& node_edges : graph.edges)
        for (const auto& [t, target] : node_edges) fired[t] = true;
    for (TransitionId t = 0; t < w.net.transition_count(); ++t)
        if (!fired[t])
            return {Soundness::violation, "dead transition: " + w.net.transition(t).id};

    return {Soundness::sound, ""};
}

RunSet runs_upto(const WFNet& w, std::size_t max_len, std::size_t state_budget) {
    RunSet result;
    const Marking final = w.final_marking();

    using State = std::pair<Marking, Trace>;
    std::set<State> seen;
    std::deque<State> queue;

    const State start{w.initial_marking(), {}};
    seen.insert(start);
    queue.push_back(start);
    std::size_t expansions = 0;

    while (!queue.empty()) {
        if (++expansions > state_budget) {
            result.truncated = true;
            break;
        }
        const auto [marking, trace] = queue.front();
        queue.pop_front();

        auto [it, inserted] = result.runs.emplace(trace, false);
        if (marking == final) it->second = true;

        for (TransitionId t : enabled(w.net, marking)) {
            const auto& label = w.net.transition(t).label;
            if (label && trace.size() >= max_len) continue;
            State next{fire(w.net, marking, t), trace};
            if (label) next.second.push_back(*label);
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
    return result;
}

EventLog playout(const WFNet& w, std::size_t n_traces, const PlayoutOptions& options) {
    std::mt19937_64 rng(options.seed);
    const Marking initial = w.initial_marking();
    const Marking final = w.final_marking();
    // Silent transitions do not count toward max_len, so bound raw firings
    // separately to escape τ cycles.
    const std::size_t firing_cap = 16 * options.max_len + 64;

    EventLog log;
    for (std::size_t i = 0; i < n_traces; ++i) {
        bool emitted = false;
        for (std::size_t attempt = 0; attempt < options.retries && !emitted; ++attempt) {
            Marking m = initial;
            Trace trace;
            for (std::size_t firings = 0; firings < firing_cap; ++firings) {
                if (m == final) {
                    log.add(trace);
                    emitted = true;
                    break;
                }
                const auto choices = enabled(w.net, m);
                if (choices.empty()) break; // deadlock: resample
                const TransitionId t =
                    choices[static_cast<std::size_t>(rng() % choices.size())];
                const auto& label = w.net.transition(t).label;
                if (label) {
                    if (trace.size() >= options.max_len) break; // too long: resample
                    trace.push_back(*label);
                }
                m = fire(w.net, m, t);
            }
        }
        if (!emitted)
            throw budget_error("playout: no complete trace within " +
                               std::to_string(options.max_len) + " events after " +
                               std::to_string(options.retries) +
                               " attempts; consider a larger max_len");
    }
    return log;
}

} // namespace hwfmine
