#include "hwfmine/xes.hpp"

#include "hwfmine/errors.hpp"
#include "hwfmine/xml.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hwfmine {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// Parses an ISO-8601 timestamp into microseconds since the epoch.
// Accepts fractional seconds and Z / ±hh:mm offsets.
bool parse_timestamp(const std::string& text, std::int64_t& micros_out) {
    int year, month, day, hour, minute, second;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%n", &year, &month, &day, &hour, &minute,
                    &second, &consumed) != 6)
        return false;

    std::int64_t micros = 0;
    std::size_t pos = static_cast<std::size_t>(consumed);
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::int64_t scale = 100000;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (scale > 0) micros += (text[pos] - '0') * scale;
            scale /= 10;
            ++pos;
        }
    }

    std::int64_t offset_minutes = 0;
    if (pos < text.size()) {
        const char sign = text[pos];
        if (sign == '+' || sign == '-') {
            int oh = 0, om = 0;
            if (std::sscanf(text.c_str() + pos + 1, "%d:%d", &oh, &om) < 1) return false;
            offset_minutes = (sign == '-' ? -1 : 1) * (oh * 60 + om);
        } else if (sign != 'Z') {
            return false;
        }
    }

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    std::int64_t seconds = days * 86400 + hour * 3600 + minute * 60 + second;
    seconds -= offset_minutes * 60;
    micros_out = seconds * 1000000 + micros;
    return true;
}

struct ParsedEvent {
    Activity name;
    bool has_timestamp = false;
    std::int64_t timestamp = 0;
};

ParsedEvent parse_event(const xml::Node& event, std::size_t trace_index) {
    ParsedEvent result;
    bool has_name = false;
    for (const auto& attr : event.children) {
        const std::string* key = attr.attribute("key");
        const std::string* value = attr.attribute("value");
        if (!key || !value) continue;
        if (*key == "concept:name") {
            result.name = *value;
            has_name = true;
        } else if (*key == "time:timestamp") {
            result.has_timestamp = parse_timestamp(*value, result.timestamp);
        }
    }
    if (!has_name)
        throw input_error("event without concept:name in trace #" +
                          std::to_string(trace_index + 1));
    return result;
}

void collect_traces(const xml::Node& node, std::vector<const xml::Node*>& out) {
    if (node.name == "trace") {
        out.push_back(&node);
        return;
    }
    for (const auto& child : node.children) collect_traces(child, out);
}

} // namespace

EventLog parse_xes(const std::string& content, const std::string& source_name) {
    const xml::Node root = xml::parse(content, source_name);

    std::vector<const xml::Node*> trace_nodes;
    collect_traces(root, trace_nodes);

    EventLog log;
    std::size_t index = 0;
    for (const xml::Node* trace_node : trace_nodes) {
        std::vector<ParsedEvent> events;
        for (const xml::Node* event_node : trace_node->children_named("event"))
            events.push_back(parse_event(*event_node, index));

        const bool all_stamped = std::all_of(events.begin(), events.end(),
                                             [](const ParsedEvent& e) { return e.has_timestamp; });
        if (all_stamped)
            std::stable_sort(events.begin(), events.end(),
                             [](const ParsedEvent& a, const ParsedEvent& b) {
                                 return a.timestamp < b.timestamp;
                             });

        Trace trace;
        trace.reserve(events.size());
        for (auto& e : events) trace.push_back(std::move(e.name));
        log.add(std::move(trace));
        ++index;
    }
    return log;
}

EventLog read_xes_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open XES file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_xes(buffer.str(), path);
}

std::string write_xes(const EventLog& log) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<log xes.version=\"1.0\">\n";
    std::size_t case_number = 1;
    for (const auto& [trace, count] : log.traces()) {
        for (EventLog::Count i = 0; i < count; ++i, ++case_number) {
            out << "  <trace>\n";
            out << "    <string key=\"concept:name\" value=\"case_" << case_number << "\"/>\n";
            for (const auto& activity : trace) {
                out << "    <event>\n";
                out << "      <string key=\"concept:name\" value=\"" << xml::escape(activity)
                    << "\"/>\n";
                out << "    </event>\n";
            }
            out << "  </trace>\n";
        }
    }
    out << "</log>\n";
    return out.str();
}

void write_xes_file(const EventLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write XES file: " + path);
    out << write_xes(log);
}

} // namespace hwfmine
