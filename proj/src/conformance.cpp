#include "hwfmine/conformance.hpp"

#include "hwfmine/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <queue>
#include <tuple>

namespace hwfmine {

Fit perfectly_fits(const WFNet& w, const Trace& sigma, std::size_t state_budget) {
    const Marking final = w.final_marking();
    using State = std::pair<Marking, std::size_t>;
    std::set<State> seen;
    std::deque<State> queue;
    const State start{w.initial_marking(), 0};
    seen.insert(start);
    queue.push_back(start);
    std::size_t expansions = 0;

    while (!queue.empty()) {
        if (++expansions > state_budget) return Fit::inconclusive;
        const auto [m, pos] = queue.front();
        queue.pop_front();
        if (pos == sigma.size() && m == final) return Fit::yes;
        for (TransitionId t : enabled(w.net, m)) {
            const auto& label = w.net.transition(t).label;
            State next{fire(w.net, m, t), pos};
            if (label) {
                if (pos >= sigma.size() || *label != sigma[pos]) continue;
                next.second = pos + 1;
            }
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
    return Fit::no;
}

Trace Alignment::model_trace() const {
    Trace result;
    for (const auto& move : moves)
        if (move.kind != AlignmentMove::Kind::log && move.activity)
            result.push_back(*move.activity);
    return result;
}

std::uint64_t min_model_cost(const WFNet& w, std::size_t state_budget) {
    const Marking final = w.final_marking();
    using QueueEntry = std::tuple<std::uint64_t, std::uint64_t, Marking>;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
    std::map<Marking, std::uint64_t> best;
    std::uint64_t sequence = 0;
    queue.emplace(0, sequence++, w.initial_marking());
    best[w.initial_marking()] = 0;
    std::size_t expansions = 0;

    while (!queue.empty()) {
        auto [cost, seq, m] = queue.top();
        queue.pop();
        auto it = best.find(m);
        if (it != best.end() && it->second < cost) continue;
        if (m == final) return cost;
        if (++expansions > state_budget)
            throw budget_error("min_model_cost: state budget exhausted");
        for (TransitionId t : enabled(w.net, m)) {
            const std::uint64_t step = w.net.transition(t).silent() ? 0 : 1;
            Marking next = fire(w.net, m, t);
            auto [bit, inserted] = best.emplace(next, cost + step);
            if (!inserted) {
                if (bit->second <= cost + step) continue;
                bit->second = cost + step;
            }
            queue.emplace(cost + step, sequence++, std::move(next));
        }
    }
    throw input_error("net has no complete run from source to sink");
}

namespace {

struct ProductState {
    Marking m;
    std::size_t pos;

    auto operator<=>(const ProductState&) const = default;
};

} // namespace

Alignment align(const WFNet& w, const Trace& sigma, std::size_t state_budget) {
    const Marking final = w.final_marking();

    struct Parent {
        ProductState state;
        AlignmentMove move;
    };
    std::map<ProductState, std::uint64_t> best;
    std::map<ProductState, Parent> parents;
    using QueueEntry = std::tuple<std::uint64_t, std::uint64_t, ProductState>;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;

    const ProductState start{w.initial_marking(), 0};
    best[start] = 0;
    std::uint64_t sequence = 0;
    queue.emplace(0, sequence++, start);
    std::size_t expansions = 0;

    auto relax = [&](const ProductState& from, std::uint64_t cost, ProductState to,
                     AlignmentMove move) {
        auto [it, inserted] = best.emplace(to, cost);
        if (!inserted) {
            if (it->second <= cost) return;
            it->second = cost;
        }
        parents[to] = {from, std::move(move)};
        queue.emplace(cost, sequence++, std::move(to));
    };

    while (!queue.empty()) {
        auto [cost, seq, state] = queue.top();
        queue.pop();
        if (best[state] < cost) continue;

        if (state.pos == sigma.size() && state.m == final) {
            Alignment result;
            result.cost = cost;
            ProductState cursor = state;
            while (!(cursor == start)) {
                auto it = parents.find(cursor);
                result.moves.push_back(it->second.move);
                cursor = it->second.state;
            }
            std::reverse(result.moves.begin(), result.moves.end());
            return result;
        }
        if (++expansions > state_budget) {
            Alignment partial;
            partial.complete = false;
            partial.cost = sigma.size() + min_model_cost(w, state_budget);
            return partial;
        }

        // Synchronous moves first, then model moves, then the log move, so
        // equal-cost ties resolve in that order.
        for (TransitionId t : enabled(w.net, state.m)) {
            const auto& label = w.net.transition(t).label;
            if (!label || state.pos >= sigma.size() || *label != sigma[state.pos]) continue;
            relax(state, cost, {fire(w.net, state.m, t), state.pos + 1},
                  {AlignmentMove::Kind::synchronous, *label, w.net.transition(t).id});
        }
        for (TransitionId t : enabled(w.net, state.m)) {
            const auto& label = w.net.transition(t).label;
            const std::uint64_t step = label ? 1 : 0;
            relax(state, cost + step, {fire(w.net, state.m, t), state.pos},
                  {AlignmentMove::Kind::model, label, w.net.transition(t).id});
        }
        if (state.pos < sigma.size())
            relax(state, cost + 1, {state.m, state.pos + 1},
                  {AlignmentMove::Kind::log, sigma[state.pos], ""});
    }
    throw input_error("alignment: net has no complete run from source to sink");
}

FitnessResult alignment_fitness(const WFNet& w, const EventLog& log, std::size_t state_budget) {
    if (log.empty()) throw input_error("alignment_fitness: empty log");
    const std::uint64_t c_min = min_model_cost(w, state_budget);

    FitnessResult result;
    double weighted_sum = 0.0;
    EventLog::Count total = 0;
    for (const auto& [trace, count] : log.traces()) {
        Alignment alignment = align(w, trace, state_budget);
        TraceConformance tc;
        tc.trace = trace;
        tc.count = count;
        tc.cost = alignment.cost;
        tc.aligned = alignment.complete;
        const double denom = static_cast<double>(trace.size() + c_min);
        tc.fitness = denom == 0.0 ? 1.0 : 1.0 - static_cast<double>(alignment.cost) / denom;
        if (!alignment.complete) result.partial = true;
        weighted_sum += tc.fitness * static_cast<double>(count);
        total += count;
        result.traces.push_back(std::move(tc));
    }
    result.fitness = weighted_sum / static_cast<double>(total);
    return result;
}

namespace {

// Searches for a silent-only firing path from m to a marking satisfying
// `goal`; returns the reached marking.
std::optional<Marking> silent_search(const LabeledPetriNet& net, const Marking& m,
                                     const std::function<bool(const Marking&)>& goal,
                                     std::size_t state_budget,
                                     std::vector<std::pair<Marking, TransitionId>>* path_out) {
    struct Node {
        Marking m;
        std::ptrdiff_t parent;
        TransitionId via;
    };
    std::vector<Node> nodes{{m, -1, 0}};
    std::set<Marking> seen{m};
    std::size_t head = 0;
    while (head < nodes.size()) {
        if (nodes.size() > state_budget) return std::nullopt;
        const Marking current = nodes[head].m;
        if (goal(current)) {
            if (path_out) {
                std::vector<std::pair<Marking, TransitionId>> path;
                for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(head); nodes[i].parent >= 0;
                     i = nodes[i].parent)
                    path.emplace_back(nodes[i].m, nodes[i].via);
                std::reverse(path.begin(), path.end());
                *path_out = std::move(path);
            }
            return current;
        }
        for (TransitionId t : enabled(net, current)) {
            if (!net.transition(t).silent()) continue;
            Marking next = fire(net, current, t);
            if (seen.insert(next).second)
                nodes.push_back({std::move(next), static_cast<std::ptrdiff_t>(head), t});
        }
        ++head;
    }
    return std::nullopt;
}

} // namespace

double token_replay_fitness(const WFNet& w, const EventLog& log, std::size_t state_budget) {
    if (log.empty()) throw input_error("token_replay_fitness: empty log");

    std::uint64_t produced = 0, consumed = 0, missing = 0, remaining = 0;
    for (const auto& [trace, count] : log.traces()) {
        std::uint64_t p = 1, c = 0, mis = 0, rem = 0; // initial token counts as produced

        if (perfectly_fits(w, trace, state_budget) == Fit::yes) {
            // A clean replay exists: count it as lossless without
            // re-deriving the exact firing sequence.
            produced += (trace.size() + 1) * count;
            consumed += (trace.size() + 1) * count;
            continue;
        }

        Marking m = w.initial_marking();
        auto fire_counted = [&](TransitionId t) {
            for (const auto& arc : w.net.inputs(t)) c += arc.weight;
            for (const auto& arc : w.net.outputs(t)) p += arc.weight;
            m = fire(w.net, m, t);
        };

        for (const auto& a : trace) {
            std::vector<TransitionId> candidates;
            for (TransitionId t = 0; t < w.net.transition_count(); ++t)
                if (w.net.transition(t).label == a) candidates.push_back(t);
            if (candidates.empty()) continue; // activity unknown to the net: skip

            TransitionId chosen = candidates.front();
            bool ready = false;
            for (TransitionId t : candidates)
                if (is_enabled(w.net, m, t)) {
                    chosen = t;
                    ready = true;
                    break;
                }
            if (!ready) {
                // Try to enable one candidate through silent moves.
                std::vector<std::pair<Marking, TransitionId>> path;
                auto reached = silent_search(
                    w.net, m,
                    [&](const Marking& mm) {
                        return std::any_of(candidates.begin(), candidates.end(),
                                           [&](TransitionId t) { return is_enabled(w.net, mm, t); });
                    },
                    state_budget, &path);
                if (reached) {
                    for (const auto& [marking, t] : path) fire_counted(t);
                    for (TransitionId t : candidates)
                        if (is_enabled(w.net, m, t)) {
                            chosen = t;
                            ready = true;
                            break;
                        }
                }
            }
            if (!ready) {
                // Force-enable the first candidate, counting missing tokens.
                for (const auto& arc : w.net.inputs(chosen)) {
                    const std::uint32_t have = m[arc.place];
                    if (have < arc.weight) {
                        mis += arc.weight - have;
                        m[arc.place] = arc.weight;
                    }
                }
            }
            fire_counted(chosen);
        }

        // Head toward the final marking over silent transitions.
        const Marking final = w.final_marking();
        std::vector<std::pair<Marking, TransitionId>> path;
        if (silent_search(w.net, m, [&](const Marking& mm) { return mm == final; }, state_budget,
                          &path)) {
            for (const auto& [marking, t] : path) fire_counted(t);
        }

        c += 1; // consuming the token on the sink
        if (m[w.sink] >= 1) {
            Marking leftovers = m;
            leftovers[w.sink] -= 1;
            rem += leftovers.total_tokens();
        } else {
            mis += 1;
            rem += m.total_tokens();
        }

        produced += p * count;
        consumed += c * count;
        missing += mis * count;
        remaining += rem * count;
    }

    const double half1 =
        consumed == 0 ? 1.0 : 1.0 - static_cast<double>(missing) / static_cast<double>(consumed);
    const double half2 =
        produced == 0 ? 1.0 : 1.0 - static_cast<double>(remaining) / static_cast<double>(produced);
    return 0.5 * half1 + 0.5 * half2;
}

namespace {

// All markings reachable from any marking in `set` by silent firings only
// (including the originals).
std::set<Marking> silent_closure(const LabeledPetriNet& net, const std::set<Marking>& set,
                                 std::size_t state_budget) {
    std::set<Marking> closure = set;
    std::deque<Marking> queue(set.begin(), set.end());
    while (!queue.empty()) {
        if (closure.size() > state_budget)
            throw budget_error("etc_precision: silent closure exceeded the state budget");
        const Marking m = queue.front();
        queue.pop_front();
        for (TransitionId t : enabled(net, m)) {
            if (!net.transition(t).silent()) continue;
            Marking next = fire(net, m, t);
            if (closure.insert(next).second) queue.push_back(next);
        }
    }
    return closure;
}

std::set<Activity> enabled_visible(const LabeledPetriNet& net, const std::set<Marking>& closure) {
    std::set<Activity> result;
    for (const auto& m : closure)
        for (TransitionId t : enabled(net, m))
            if (const auto& label = net.transition(t).label) result.insert(*label);
    return result;
}

} // namespace

double etc_precision(const WFNet& w, const EventLog& log, std::size_t state_budget) {
    if (log.empty()) throw input_error("etc_precision: empty log");

    // Replace non-fitting traces by the model run of their optimal alignment.
    EventLog aligned;
    for (const auto& [trace, count] : log.traces()) {
        if (perfectly_fits(w, trace, state_budget) == Fit::yes) {
            aligned.add(trace, count);
        } else {
            Alignment alignment = align(w, trace, state_budget);
            if (!alignment.complete)
                throw budget_error("etc_precision: alignment budget exhausted");
            aligned.add(alignment.model_trace(), count);
        }
    }

    // Prefix automaton with multiplicity weights and observed continuations.
    struct PrefixState {
        EventLog::Count weight = 0;
        std::set<Activity> observed;
    };
    std::map<Trace, PrefixState> states;
    for (const auto& [trace, count] : aligned.traces()) {
        Trace prefix;
        states[prefix].weight += count;
        for (const auto& a : trace) {
            states[prefix].observed.insert(a);
            prefix.push_back(a);
            states[prefix].weight += count;
        }
    }

    // Marking sets per prefix, built parent-first (map order puts every
    // prefix before its extensions).
    std::map<Trace, std::set<Marking>> markings;
    markings[Trace{}] = silent_closure(w.net, {w.initial_marking()}, state_budget);

    std::uint64_t escaping_total = 0, allowed_total = 0;
    for (const auto& [prefix, state] : states) {
        auto mit = markings.find(prefix);
        if (mit == markings.end() || mit->second.empty())
            throw error("internal: aligned prefix is not replayable");
        const auto& closure = mit->second;

        const std::set<Activity> allowed = enabled_visible(w.net, closure);
        std::uint64_t escaping = 0;
        for (const auto& a : allowed)
            if (state.observed.count(a) == 0) ++escaping;
        escaping_total += escaping * state.weight;
        allowed_total += allowed.size() * state.weight;

        for (const auto& a : state.observed) {
            std::set<Marking> next;
            for (const auto& m : closure)
                for (TransitionId t : enabled(w.net, m))
                    if (w.net.transition(t).label == a) next.insert(fire(w.net, m, t));
            Trace child = prefix;
            child.push_back(a);
            markings[child] = silent_closure(w.net, next, state_budget);
        }
    }

    if (allowed_total == 0) return 1.0;
    return 1.0 - static_cast<double>(escaping_total) / static_cast<double>(allowed_total);
}

ConformanceReport conformance_report(const WFNet& w, const EventLog& log,
                                     std::size_t state_budget) {
    if (log.empty())
        throw input_error("conformance: metrics are undefined for an empty log");
    FitnessResult fitness = alignment_fitness(w, log, state_budget);
    ConformanceReport report;
    report.fitness = fitness.fitness;
    report.partial = fitness.partial;
    report.traces = std::move(fitness.traces);
    report.precision = etc_precision(w, log, state_budget);
    return report;
}

std::string to_json(const ConformanceReport& report) {
    nlohmann::json doc;
    doc["fitness"] = report.fitness;
    doc["precision"] = report.precision;
    if (report.partial) doc["partial"] = true;
    doc["traces"] = nlohmann::json::array();
    for (const auto& tc : report.traces) {
        nlohmann::json entry;
        entry["trace"] = tc.trace;
        entry["count"] = tc.count;
        entry["cost"] = tc.cost;
        entry["fitness"] = tc.fitness;
        if (!tc.aligned) entry["aligned"] = false;
        doc["traces"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

} // namespace hwfmine
