#include "hwfmine/hierarchy.hpp"

#include "hwfmine/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <tuple>

namespace hwfmine {

std::optional<std::string> HWFNet::violation() const {
    if (auto v = high.structural_violation()) return "high-level net: " + *v;
    for (const auto& [name, subnet] : subnets)
        if (auto v = subnet.structural_violation()) return "subnet '" + name + "': " + *v;
    for (TransitionId t = 0; t < high.net.transition_count(); ++t) {
        const auto& label = high.net.transition(t).label;
        if (label && subnets.count(*label) == 0)
            return "high-level label '" + *label + "' has no subnet";
    }
    std::map<Activity, std::string> owner;
    for (const auto& [name, subnet] : subnets) {
        for (const Activity& a : subnet.net.label_alphabet()) {
            auto [it, inserted] = owner.emplace(a, name);
            if (!inserted)
                return "activity '" + a + "' appears in subnets '" + it->second + "' and '" +
                       name + "'";
        }
    }
    return std::nullopt;
}

namespace {

// Rebuilds `host` with the transitions selected by `replacement` replaced by
// fresh copies of their subnet, fusing the copy's source with the
// transition's input places and its sink with its output places.
WFNet inline_subnets(const WFNet& host,
                     const std::function<const WFNet*(TransitionId)>& replacement) {
    WFNet result;
    std::vector<PlaceId> place_map(host.net.place_count());
    for (PlaceId p = 0; p < host.net.place_count(); ++p)
        place_map[p] = result.net.add_place(host.net.place(p).id);
    result.source = place_map[host.source];
    result.sink = place_map[host.sink];

    for (TransitionId t = 0; t < host.net.transition_count(); ++t) {
        const WFNet* sub = replacement(t);
        if (!sub) {
            const TransitionId nt = result.net.add_transition(host.net.transition(t).label,
                                                              host.net.transition(t).id);
            for (const auto& arc : host.net.inputs(t))
                result.net.add_input_arc(place_map[arc.place], nt, arc.weight);
            for (const auto& arc : host.net.outputs(t))
                result.net.add_output_arc(nt, place_map[arc.place], arc.weight);
            continue;
        }

        const std::string prefix = host.net.transition(t).id + ".";
        // Interior places of the copy; source and sink are fused away.
        std::vector<PlaceId> sub_place_map(sub->net.place_count(),
                                           static_cast<PlaceId>(-1));
        for (PlaceId p = 0; p < sub->net.place_count(); ++p) {
            if (p == sub->source || p == sub->sink) continue;
            sub_place_map[p] = result.net.add_place(prefix + sub->net.place(p).id);
        }
        for (TransitionId u = 0; u < sub->net.transition_count(); ++u) {
            const TransitionId nu = result.net.add_transition(
                sub->net.transition(u).label, prefix + sub->net.transition(u).id);
            for (const auto& arc : sub->net.inputs(u)) {
                if (arc.place == sub->source) {
                    for (const auto& host_arc : host.net.inputs(t))
                        result.net.add_input_arc(place_map[host_arc.place], nu,
                                                 arc.weight * host_arc.weight);
                } else {
                    result.net.add_input_arc(sub_place_map[arc.place], nu, arc.weight);
                }
            }
            for (const auto& arc : sub->net.outputs(u)) {
                if (arc.place == sub->sink) {
                    for (const auto& host_arc : host.net.outputs(t))
                        result.net.add_output_arc(nu, place_map[host_arc.place],
                                                  arc.weight * host_arc.weight);
                } else {
                    result.net.add_output_arc(nu, sub_place_map[arc.place], arc.weight);
                }
            }
        }
    }
    return result;
}

} // namespace

WFNet flatten(const HWFNet& h) {
    std::vector<const WFNet*> replacements(h.high.net.transition_count(), nullptr);
    for (TransitionId t = 0; t < h.high.net.transition_count(); ++t) {
        const auto& label = h.high.net.transition(t).label;
        if (!label) continue;
        auto it = h.subnets.find(*label);
        if (it == h.subnets.end())
            throw input_error("flatten: high-level label '" + *label + "' has no subnet");
        replacements[t] = &it->second;
    }
    return inline_subnets(h.high, [&](TransitionId t) { return replacements[t]; });
}

WFNet make_loop(const WFNet& body) {
    WFNet result;
    const PlaceId source = result.net.add_place("loop_i");
    const PlaceId sink = result.net.add_place("loop_f");
    result.source = source;
    result.sink = sink;

    std::vector<PlaceId> place_map(body.net.place_count());
    for (PlaceId p = 0; p < body.net.place_count(); ++p)
        place_map[p] = result.net.add_place("b." + body.net.place(p).id);
    for (TransitionId t = 0; t < body.net.transition_count(); ++t) {
        const TransitionId nt = result.net.add_transition(body.net.transition(t).label,
                                                          "b." + body.net.transition(t).id);
        for (const auto& arc : body.net.inputs(t))
            result.net.add_input_arc(place_map[arc.place], nt, arc.weight);
        for (const auto& arc : body.net.outputs(t))
            result.net.add_output_arc(nt, place_map[arc.place], arc.weight);
    }

    const TransitionId enter = result.net.add_transition(std::nullopt, "loop_in");
    result.net.add_input_arc(source, enter);
    result.net.add_output_arc(enter, place_map[body.source]);
    const TransitionId leave = result.net.add_transition(std::nullopt, "loop_out");
    result.net.add_input_arc(place_map[body.sink], leave);
    result.net.add_output_arc(leave, sink);
    const TransitionId back = result.net.add_transition(std::nullopt, "loop_back");
    result.net.add_input_arc(place_map[body.sink], back);
    result.net.add_output_arc(back, place_map[body.source]);
    return result;
}

WFNet substitute(const WFNet& net, const Activity& label, const WFNet& sub) {
    return inline_subnets(net, [&](TransitionId t) -> const WFNet* {
        const auto& tl = net.net.transition(t).label;
        return (tl && *tl == label) ? &sub : nullptr;
    });
}

namespace {

// One running sub-process: the high-level transition it implements plus the
// current marking of its subnet copy.
struct Instance {
    TransitionId high_transition;
    Marking low;

    auto operator<=>(const Instance&) const = default;
};

struct HwfState {
    Marking high;
    std::vector<Instance> instances; // kept sorted for canonical comparison

    auto operator<=>(const HwfState&) const = default;
};

} // namespace

RunSet hwf_runs_upto(const HWFNet& h, std::size_t max_len, std::size_t state_budget) {
    // Resolve each visible high-level transition to its subnet once.
    std::vector<const WFNet*> subnet_of(h.high.net.transition_count(), nullptr);
    for (TransitionId t = 0; t < h.high.net.transition_count(); ++t) {
        const auto& label = h.high.net.transition(t).label;
        if (!label) continue;
        auto it = h.subnets.find(*label);
        if (it == h.subnets.end())
            throw input_error("hwf_runs_upto: high-level label '" + *label + "' has no subnet");
        subnet_of[t] = &it->second;
    }

    RunSet result;
    const Marking high_final = h.high.final_marking();

    using Entry = std::pair<HwfState, Trace>;
    std::set<Entry> seen;
    std::deque<Entry> queue;
    const Entry start{{h.high.initial_marking(), {}}, {}};
    seen.insert(start);
    queue.push_back(start);
    std::size_t expansions = 0;

    auto push = [&](HwfState state, Trace trace) {
        std::sort(state.instances.begin(), state.instances.end());
        Entry entry{std::move(state), std::move(trace)};
        if (seen.insert(entry).second) queue.push_back(std::move(entry));
    };

    while (!queue.empty()) {
        if (++expansions > state_budget) {
            result.truncated = true;
            break;
        }
        const auto [state, trace] = queue.front();
        queue.pop_front();

        auto [it, inserted] = result.runs.emplace(trace, false);
        if (state.high == high_final && state.instances.empty()) it->second = true;

        // Start an enabled high-level transition: consume its input tokens.
        for (TransitionId t : enabled(h.high.net, state.high)) {
            Marking consumed = state.high;
            for (const auto& arc : h.high.net.inputs(t)) consumed[arc.place] -= arc.weight;
            if (!subnet_of[t]) {
                // Silent high-level transition fires atomically.
                Marking next = consumed;
                for (const auto& arc : h.high.net.outputs(t)) next[arc.place] += arc.weight;
                HwfState s{std::move(next), state.instances};
                push(std::move(s), trace);
            } else {
                HwfState s{std::move(consumed), state.instances};
                s.instances.push_back({t, subnet_of[t]->initial_marking()});
                push(std::move(s), trace);
            }
        }

        for (std::size_t i = 0; i < state.instances.size(); ++i) {
            const Instance& inst = state.instances[i];
            const WFNet& sub = *subnet_of[inst.high_transition];

            // Fire a low-level transition inside the running sub-process.
            for (TransitionId u : enabled(sub.net, inst.low)) {
                const auto& label = sub.net.transition(u).label;
                if (label && trace.size() >= max_len) continue;
                HwfState s = state;
                s.instances[i].low = fire(sub.net, inst.low, u);
                Trace next_trace = trace;
                if (label) next_trace.push_back(*label);
                push(std::move(s), std::move(next_trace));
            }

            // Completion: sub-process at its final marking produces the
            // high-level transition's output tokens.
            if (inst.low == sub.final_marking()) {
                HwfState s = state;
                s.instances.erase(s.instances.begin() + static_cast<std::ptrdiff_t>(i));
                for (const auto& arc : h.high.net.outputs(inst.high_transition))
                    s.high[arc.place] += arc.weight;
                push(std::move(s), trace);
            }
        }
    }
    return result;
}

} // namespace hwfmine
