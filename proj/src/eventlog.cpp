#include "hwfmine/eventlog.hpp"

#include <algorithm>
#include <sstream>

namespace hwfmine {

void EventLog::add(Trace trace, Count multiplicity) {
    if (multiplicity == 0) return;
    traces_[std::move(trace)] += multiplicity;
}

EventLog::Count EventLog::size() const {
    Count total = 0;
    for (const auto& [trace, count] : traces_) total += count;
    return total;
}

EventLog::Count EventLog::event_count() const {
    Count total = 0;
    for (const auto& [trace, count] : traces_) total += count * trace.size();
    return total;
}

std::set<Activity> EventLog::alphabet() const {
    std::set<Activity> result;
    for (const auto& [trace, count] : traces_)
        result.insert(trace.begin(), trace.end());
    return result;
}

Trace project(const Trace& sigma, const std::set<Activity>& q) {
    Trace result;
    result.reserve(sigma.size());
    for (const auto& a : sigma)
        if (q.count(a)) result.push_back(a);
    return result;
}

EventLog project_log(const EventLog& log, const std::set<Activity>& q) {
    EventLog result;
    for (const auto& [trace, count] : log.traces())
        result.add(project(trace, q), count);
    return result;
}

Trace remove_stuttering(const Trace& sigma) {
    Trace result;
    result.reserve(sigma.size());
    for (const auto& a : sigma)
        if (result.empty() || result.back() != a) result.push_back(a);
    return result;
}

std::string PartitionReport::describe() const {
    if (ok()) return "ok";
    std::ostringstream out;
    for (const auto& o : overlaps)
        out << "activity '" << o.activity << "' belongs to both group '" << o.first_group
            << "' and group '" << o.second_group << "'\n";
    if (!uncovered.empty()) {
        out << "activities not covered by any group:";
        for (const auto& a : uncovered) out << " '" << a << "'";
        out << "\n";
    }
    return out.str();
}

std::string LoopCompatibility::describe() const {
    if (ok()) return "ok";
    std::ostringstream out;
    out << "loop body straddles sub-process boundaries; suggested refinement:\n";
    for (const auto& h : hints) {
        out << "  split group '" << h.group << "' into {";
        bool first = true;
        for (const auto& a : h.inside) {
            if (!first) out << ", ";
            out << a;
            first = false;
        }
        out << "} (inside the loop) and {";
        first = true;
        for (const auto& a : h.outside) {
            if (!first) out << ", ";
            out << a;
            first = false;
        }
        out << "} (outside)\n";
    }
    return out.str();
}

void Partition::add_group(const std::string& name, std::set<Activity> activities) {
    groups_[name] = std::move(activities);
}

void Partition::add_to_group(const std::string& name, const Activity& activity) {
    groups_[name].insert(activity);
}

std::string Partition::group_of(const Activity& activity) const {
    for (const auto& [name, members] : groups_)
        if (members.count(activity)) return name;
    return {};
}

PartitionReport Partition::validate(const EventLog& log) const {
    PartitionReport report;
    for (auto it = groups_.begin(); it != groups_.end(); ++it) {
        for (auto jt = std::next(it); jt != groups_.end(); ++jt) {
            std::vector<Activity> shared;
            std::set_intersection(it->second.begin(), it->second.end(),
                                  jt->second.begin(), jt->second.end(),
                                  std::back_inserter(shared));
            for (auto& a : shared)
                report.overlaps.push_back({std::move(a), it->first, jt->first});
        }
    }
    for (const auto& a : log.alphabet())
        if (group_of(a).empty()) report.uncovered.push_back(a);
    return report;
}

LoopCompatibility Partition::loop_compatibility(const std::set<Activity>& loop_alphabet) const {
    LoopCompatibility result;
    for (const auto& [name, members] : groups_) {
        std::set<Activity> inside;
        std::set_intersection(members.begin(), members.end(),
                              loop_alphabet.begin(), loop_alphabet.end(),
                              std::inserter(inside, inside.end()));
        if (inside.empty()) continue;                 // B ∩ A_i = ∅
        if (inside.size() == members.size()) continue; // A_i ⊆ B
        if (std::includes(members.begin(), members.end(),
                          loop_alphabet.begin(), loop_alphabet.end()))
            continue;                                  // B ⊆ A_i
        std::set<Activity> outside;
        std::set_difference(members.begin(), members.end(), inside.begin(), inside.end(),
                            std::inserter(outside, outside.end()));
        result.hints.push_back({name, std::move(inside), std::move(outside)});
    }
    return result;
}

} // namespace hwfmine
