#include "hwfmine/abstraction.hpp"

#include "hwfmine/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace hwfmine {

EventLog lift_log(const EventLog& log, const Partition& partition) {
    EventLog result;
    for (const auto& [trace, count] : log.traces()) {
        Trace lifted;
        lifted.reserve(trace.size());
        for (const auto& a : trace) {
            const std::string group = partition.group_of(a);
            if (group.empty())
                throw input_error("lift_log: activity '" + a + "' is not covered by the partition");
            lifted.push_back(group);
        }
        result.add(remove_stuttering(lifted), count);
    }
    return result;
}

std::set<Trace> clone_traces(const Trace& sigma, std::size_t cap) {
    std::map<Activity, std::vector<std::size_t>> positions;
    for (std::size_t i = 0; i < sigma.size(); ++i) positions[sigma[i]].push_back(i);

    std::size_t combinations = 1;
    for (const auto& [a, occurrences] : positions) {
        if (occurrences.size() > 1 && combinations > cap / occurrences.size())
            throw budget_error("clone_traces: more than " + std::to_string(cap) +
                               " clones for a trace of length " + std::to_string(sigma.size()));
        combinations *= occurrences.size();
    }
    if (combinations > cap)
        throw budget_error("clone_traces: more than " + std::to_string(cap) +
                           " clones for a trace of length " + std::to_string(sigma.size()));

    const std::vector<std::pair<Activity, std::vector<std::size_t>>> choice_list(
        positions.begin(), positions.end());

    std::set<Trace> result;
    std::vector<std::size_t> kept;
    std::function<void(std::size_t)> expand = [&](std::size_t depth) {
        if (depth == choice_list.size()) {
            std::vector<std::size_t> sorted = kept;
            std::sort(sorted.begin(), sorted.end());
            Trace clone;
            clone.reserve(sorted.size());
            for (std::size_t pos : sorted) clone.push_back(sigma[pos]);
            result.insert(remove_stuttering(clone));
            return;
        }
        for (std::size_t pos : choice_list[depth].second) {
            kept.push_back(pos);
            expand(depth + 1);
            kept.pop_back();
        }
    };
    expand(0);
    return result;
}

EventLog clone_log(const EventLog& log, std::size_t cap) {
    EventLog result;
    for (const auto& [trace, count] : log.traces())
        for (const auto& clone : clone_traces(trace, cap)) result.add(clone, count);
    return result;
}

WFNet discover_highlevel_acyclic(const EventLog& log, const Partition& partition,
                                 const Discoverer& discoverer, std::size_t clone_cap) {
    return discoverer.discover(clone_log(lift_log(log, partition), clone_cap));
}

namespace {

// Alphabets of all maximal tandem repeats (w repeated >= 2 times
// consecutively) in sigma. Quadratic scan over periods.
void tandem_alphabets(const Trace& sigma, std::set<std::set<Activity>>& out) {
    const std::size_t n = sigma.size();
    for (std::size_t period = 1; period * 2 <= n; ++period) {
        std::size_t run = 0;
        for (std::size_t i = n - period; i-- > 0;) {
            run = (sigma[i] == sigma[i + period]) ? run + 1 : 0;
            if (run >= period) {
                std::set<Activity> component(sigma.begin() + static_cast<std::ptrdiff_t>(i),
                                             sigma.begin() + static_cast<std::ptrdiff_t>(i + period));
                out.insert(std::move(component));
            }
        }
    }
}

} // namespace

std::optional<std::set<Activity>> find_inner_loop_alphabet(const EventLog& log) {
    std::set<std::set<Activity>> components;
    for (const auto& [trace, count] : log.traces()) tandem_alphabets(trace, components);
    if (components.empty()) return std::nullopt;

    // Merge partially overlapping components until the family is laminar;
    // nested components stay separate so inner loops are found first.
    bool merged = true;
    while (merged) {
        merged = false;
        for (auto it = components.begin(); it != components.end() && !merged; ++it) {
            for (auto jt = std::next(it); jt != components.end() && !merged; ++jt) {
                const bool i_in_j = std::includes(jt->begin(), jt->end(), it->begin(), it->end());
                const bool j_in_i = std::includes(it->begin(), it->end(), jt->begin(), jt->end());
                if (i_in_j || j_in_i) continue;
                std::set<Activity> overlap;
                std::set_intersection(it->begin(), it->end(), jt->begin(), jt->end(),
                                      std::inserter(overlap, overlap.end()));
                if (overlap.empty()) continue;
                std::set<Activity> united;
                std::set_union(it->begin(), it->end(), jt->begin(), jt->end(),
                               std::inserter(united, united.end()));
                components.erase(jt);
                components.erase(it);
                components.insert(std::move(united));
                merged = true;
            }
        }
    }

    // Minimal by inclusion; std::set ordering makes the lexicographically
    // smallest minimal component come first.
    for (const auto& candidate : components) {
        bool minimal = true;
        for (const auto& other : components) {
            if (other.size() < candidate.size() &&
                std::includes(candidate.begin(), candidate.end(), other.begin(), other.end())) {
                minimal = false;
                break;
            }
        }
        if (minimal) return candidate;
    }
    return std::nullopt; // unreachable: the smallest component is minimal
}

EventLog fold_loop(const EventLog& log, const std::set<Activity>& body, const Activity& beta) {
    EventLog result;
    for (const auto& [trace, count] : log.traces()) {
        Trace folded;
        folded.reserve(trace.size());
        for (const auto& a : trace) folded.push_back(body.count(a) ? beta : a);
        result.add(remove_stuttering(folded), count);
    }
    return result;
}

LoopRegistry::Entry* LoopRegistry::find_active(const std::string& name) {
    for (auto& entry : entries)
        if (!entry.info.retired && entry.info.name == name) return &entry;
    return nullptr;
}

namespace {

bool net_has_label(const WFNet& w, const Activity& label) {
    for (TransitionId t = 0; t < w.net.transition_count(); ++t)
        if (w.net.transition(t).label == label) return true;
    return false;
}

// Inlines every still-registered loop name occurring in `net` as
// Loop(body) and retires it.
void resolve_registered_loops(WFNet& net, LoopRegistry& registry) {
    for (auto& entry : registry.entries) {
        if (entry.info.retired) continue;
        if (!net_has_label(net, entry.info.name)) continue;
        net = substitute(net, entry.info.name, make_loop(entry.body));
        entry.info.retired = true;
    }
}

} // namespace

HwfDiscovery discover_hwf(const EventLog& log, const Partition& partition,
                          const Discoverer& discoverer, const HwfDiscoveryOptions& options) {
    if (log.empty()) throw input_error("discover_hwf: empty log");
    const PartitionReport report = partition.validate(log);
    if (!report.ok()) throw partition_error("invalid partition:\n" + report.describe());

    HwfDiscovery result;
    result.lifted_log = lift_log(log, partition);

    EventLog current = log;
    Partition current_partition = partition;
    std::set<std::string> loop_groups;        // partition entries that are loop names
    std::map<std::string, WFNet> subnet_store; // sub-process nets fixed during loop folding
    std::size_t loop_counter = 0;

    // Step 1: fold inner elementary loops until the log is repetition-free.
    const std::size_t iteration_cap = static_cast<std::size_t>(log.event_count()) + 1;
    for (std::size_t iteration = 0;; ++iteration) {
        if (iteration > iteration_cap)
            throw error("internal: loop folding failed to terminate");
        const auto body_alphabet = find_inner_loop_alphabet(current);
        if (!body_alphabet) break;

        const LoopCompatibility compat = current_partition.loop_compatibility(*body_alphabet);
        if (!compat.ok())
            throw partition_error("loop body " + [&] {
                std::string s = "{";
                for (const auto& a : *body_alphabet) s += (s.size() > 1 ? ", " : "") + a;
                return s + "}";
            }() + " is incompatible with the partition\n" + compat.describe());

        const std::string beta = "__loop_" + std::to_string(++loop_counter);
        const EventLog body_log = project_log(current, *body_alphabet);

        // A body inside one sub-process is modeled at the low level; a body
        // spanning whole sub-processes is modeled as a high-level net over
        // their names, with the member sub-process nets fixed now.
        std::string enclosing_group;
        for (const auto& [name, members] : current_partition.groups()) {
            if (std::includes(members.begin(), members.end(), body_alphabet->begin(),
                              body_alphabet->end())) {
                enclosing_group = name;
                break;
            }
        }

        LoopRegistry::Entry entry;
        entry.info.name = beta;
        entry.info.alphabet = *body_alphabet;

        if (!enclosing_group.empty()) {
            // The whole body lives inside one sub-process, so it is modeled
            // directly at the low level; the raw projection keeps every
            // in-iteration repetition the discoverer must fit.
            entry.info.joined_group = enclosing_group;
            entry.body = discoverer.discover(body_log);
            resolve_registered_loops(entry.body, result.registry);
            current_partition.add_to_group(enclosing_group, beta);
        } else {
            Partition body_partition;
            std::vector<std::string> member_groups;
            for (const auto& [name, members] : current_partition.groups()) {
                std::set<Activity> inside;
                std::set_intersection(members.begin(), members.end(), body_alphabet->begin(),
                                      body_alphabet->end(), std::inserter(inside, inside.end()));
                if (inside.empty()) continue;
                body_partition.add_group(name, std::move(inside));
                member_groups.push_back(name);
            }
            entry.body =
                discover_highlevel_acyclic(body_log, body_partition, discoverer, options.clone_cap);
            resolve_registered_loops(entry.body, result.registry);

            for (const auto& name : member_groups) {
                if (loop_groups.count(name)) continue; // loop names have no sub-process net
                WFNet subnet = discoverer.discover(
                    project_log(body_log, current_partition.groups().at(name)));
                resolve_registered_loops(subnet, result.registry);
                subnet_store[name] = std::move(subnet);
            }
            current_partition.add_group(beta, {beta});
            loop_groups.insert(beta);
        }

        result.registry.entries.push_back(std::move(entry));
        current = fold_loop(current, *body_alphabet, beta);
        result.folds.push_back(current);
    }

    result.folded_log = current;

    // Step 2: the loop-free log drives the high-level discovery.
    result.processed_log = clone_log(lift_log(current, current_partition), options.clone_cap);
    result.high_raw = discoverer.discover(result.processed_log);

    // Sub-process nets for groups still present in the folded log; groups
    // absorbed by a loop keep the net discovered alongside that loop.
    const std::set<Activity> remaining = current.alphabet();
    std::map<std::string, WFNet> subnets = std::move(subnet_store);
    for (const auto& [name, members] : current_partition.groups()) {
        if (loop_groups.count(name) || subnets.count(name)) continue;
        std::set<Activity> occurring;
        std::set_intersection(members.begin(), members.end(), remaining.begin(), remaining.end(),
                              std::inserter(occurring, occurring.end()));
        if (occurring.empty()) continue;
        subnets[name] = discoverer.discover(project_log(current, members));
    }

    // Step 3: substitute the remaining loop bodies into the high-level net
    // and into the sub-process nets.
    WFNet high = result.high_raw;
    resolve_registered_loops(high, result.registry);
    for (auto& [name, subnet] : subnets) resolve_registered_loops(subnet, result.registry);

    result.hwf.high = std::move(high);
    result.hwf.subnets = std::move(subnets);
    return result;
}

} // namespace hwfmine
