#include "hwfmine/serialize.hpp"

#include "hwfmine/errors.hpp"
#include "hwfmine/xml.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace hwfmine {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write file: " + path);
    out << content;
}

std::string write_pnml(const WFNet& w, const std::string& net_id) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<pnml>\n";
    out << "  <net id=\"" << xml::escape(net_id) << "\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
    out << "    <page id=\"page0\">\n";
    for (PlaceId p = 0; p < w.net.place_count(); ++p) {
        out << "      <place id=\"" << xml::escape(w.net.place(p).id) << "\">";
        if (p == w.source) out << "<initialMarking><text>1</text></initialMarking>";
        out << "</place>\n";
    }
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        const auto& tr = w.net.transition(t);
        out << "      <transition id=\"" << xml::escape(tr.id) << "\">";
        if (tr.label) out << "<name><text>" << xml::escape(*tr.label) << "</text></name>";
        out << "</transition>\n";
    }
    std::size_t arc_number = 0;
    auto write_arc = [&](const std::string& from, const std::string& to, std::uint32_t weight) {
        out << "      <arc id=\"a" << arc_number++ << "\" source=\"" << xml::escape(from)
            << "\" target=\"" << xml::escape(to) << "\">";
        if (weight != 1) out << "<inscription><text>" << weight << "</text></inscription>";
        out << "</arc>\n";
    };
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        for (const auto& arc : w.net.inputs(t))
            write_arc(w.net.place(arc.place).id, w.net.transition(t).id, arc.weight);
        for (const auto& arc : w.net.outputs(t))
            write_arc(w.net.transition(t).id, w.net.place(arc.place).id, arc.weight);
    }
    out << "    </page>\n";
    out << "  </net>\n";
    out << "</pnml>\n";
    return out.str();
}

namespace {

void collect_named(const xml::Node& node, const std::string& name,
                   std::vector<const xml::Node*>& out) {
    if (node.name == name) out.push_back(&node);
    for (const auto& child : node.children) collect_named(child, name, out);
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// Recovers source and sink from the structure and checks they are unique.
void assign_boundary(WFNet& w, const std::string& source_name) {
    std::vector<bool> has_in(w.net.place_count(), false), has_out(w.net.place_count(), false);
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        for (const auto& arc : w.net.inputs(t)) has_out[arc.place] = true;
        for (const auto& arc : w.net.outputs(t)) has_in[arc.place] = true;
    }
    std::vector<PlaceId> sources, sinks;
    for (PlaceId p = 0; p < w.net.place_count(); ++p) {
        if (!has_in[p]) sources.push_back(p);
        if (!has_out[p]) sinks.push_back(p);
    }
    if (sources.size() != 1 || sinks.size() != 1)
        throw input_error(source_name + ": net does not have a unique source and sink place (" +
                          std::to_string(sources.size()) + " sources, " +
                          std::to_string(sinks.size()) + " sinks)");
    w.source = sources.front();
    w.sink = sinks.front();
}

} // namespace

WFNet read_pnml(const std::string& content, const std::string& source_name) {
    const xml::Node root = xml::parse(content, source_name);

    WFNet w;
    std::map<std::string, PlaceId> place_by_id;
    std::map<std::string, TransitionId> transition_by_id;

    std::vector<const xml::Node*> places, transitions, arcs;
    collect_named(root, "place", places);
    collect_named(root, "transition", transitions);
    collect_named(root, "arc", arcs);

    std::optional<PlaceId> marked_place;
    for (const xml::Node* node : places) {
        const std::string* id = node->attribute("id");
        if (!id) throw parse_error(source_name + ": place without id", node->line, node->column);
        const PlaceId p = w.net.add_place(*id);
        if (!place_by_id.emplace(*id, p).second)
            throw input_error(source_name + ": duplicate place id '" + *id + "'");
        if (const xml::Node* marking = node->first_child("initialMarking")) {
            const xml::Node* text = marking->first_child("text");
            if (text && trimmed(text->text) != "0") {
                if (marked_place)
                    throw input_error(source_name +
                                      ": more than one initially marked place; WF-nets start "
                                      "with a single token on the source");
                marked_place = p;
            }
        }
    }
    for (const xml::Node* node : transitions) {
        const std::string* id = node->attribute("id");
        if (!id)
            throw parse_error(source_name + ": transition without id", node->line, node->column);
        std::optional<Activity> label;
        if (const xml::Node* name = node->first_child("name")) {
            const xml::Node* text = name->first_child("text");
            if (text) {
                std::string value = trimmed(text->text);
                if (!value.empty()) label = std::move(value);
            }
        }
        const TransitionId t = w.net.add_transition(std::move(label), *id);
        if (!transition_by_id.emplace(*id, t).second)
            throw input_error(source_name + ": duplicate transition id '" + *id + "'");
    }
    for (const xml::Node* node : arcs) {
        const std::string* from = node->attribute("source");
        const std::string* to = node->attribute("target");
        if (!from || !to)
            throw parse_error(source_name + ": arc without source/target", node->line,
                              node->column);
        std::uint32_t weight = 1;
        if (const xml::Node* inscription = node->first_child("inscription")) {
            if (const xml::Node* text = inscription->first_child("text")) {
                try {
                    weight = static_cast<std::uint32_t>(std::stoul(trimmed(text->text)));
                } catch (const std::exception&) {
                    throw parse_error(source_name + ": bad arc inscription", node->line,
                                      node->column);
                }
            }
        }
        const auto pit = place_by_id.find(*from);
        if (pit != place_by_id.end()) {
            const auto tit = transition_by_id.find(*to);
            if (tit == transition_by_id.end())
                throw input_error(source_name + ": arc target '" + *to + "' is unknown");
            w.net.add_input_arc(pit->second, tit->second, weight);
        } else {
            const auto tit = transition_by_id.find(*from);
            if (tit == transition_by_id.end())
                throw input_error(source_name + ": arc source '" + *from + "' is unknown");
            const auto qit = place_by_id.find(*to);
            if (qit == place_by_id.end())
                throw input_error(source_name + ": arc target '" + *to + "' is unknown");
            w.net.add_output_arc(tit->second, qit->second, weight);
        }
    }

    assign_boundary(w, source_name);
    if (marked_place && *marked_place != w.source)
        throw input_error(source_name +
                          ": initial marking is not on the structural source place");
    return w;
}

namespace {

nlohmann::json net_to_json_value(const WFNet& w) {
    nlohmann::json doc;
    doc["places"] = nlohmann::json::array();
    for (PlaceId p = 0; p < w.net.place_count(); ++p)
        doc["places"].push_back({{"id", w.net.place(p).id}});
    doc["transitions"] = nlohmann::json::array();
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        nlohmann::json entry{{"id", w.net.transition(t).id}};
        if (w.net.transition(t).label)
            entry["label"] = *w.net.transition(t).label;
        else
            entry["label"] = nullptr;
        doc["transitions"].push_back(std::move(entry));
    }
    doc["arcs"] = nlohmann::json::array();
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        for (const auto& arc : w.net.inputs(t))
            doc["arcs"].push_back({{"source", w.net.place(arc.place).id},
                                   {"target", w.net.transition(t).id},
                                   {"weight", arc.weight}});
        for (const auto& arc : w.net.outputs(t))
            doc["arcs"].push_back({{"source", w.net.transition(t).id},
                                   {"target", w.net.place(arc.place).id},
                                   {"weight", arc.weight}});
    }
    doc["source"] = w.net.place(w.source).id;
    doc["sink"] = w.net.place(w.sink).id;
    return doc;
}

WFNet net_from_json_value(const nlohmann::json& doc, const std::string& source_name) {
    WFNet w;
    std::map<std::string, PlaceId> place_by_id;
    std::map<std::string, TransitionId> transition_by_id;
    for (const auto& entry : doc.at("places")) {
        const std::string id = entry.at("id").get<std::string>();
        if (!place_by_id.emplace(id, w.net.add_place(id)).second)
            throw input_error(source_name + ": duplicate place id '" + id + "'");
    }
    for (const auto& entry : doc.at("transitions")) {
        const std::string id = entry.at("id").get<std::string>();
        std::optional<Activity> label;
        if (entry.contains("label") && !entry.at("label").is_null())
            label = entry.at("label").get<std::string>();
        if (!transition_by_id.emplace(id, w.net.add_transition(std::move(label), id)).second)
            throw input_error(source_name + ": duplicate transition id '" + id + "'");
    }
    for (const auto& entry : doc.at("arcs")) {
        const std::string from = entry.at("source").get<std::string>();
        const std::string to = entry.at("target").get<std::string>();
        const auto weight = entry.value("weight", 1u);
        if (auto pit = place_by_id.find(from); pit != place_by_id.end()) {
            auto tit = transition_by_id.find(to);
            if (tit == transition_by_id.end())
                throw input_error(source_name + ": arc target '" + to + "' is unknown");
            w.net.add_input_arc(pit->second, tit->second, weight);
        } else if (auto tit = transition_by_id.find(from); tit != transition_by_id.end()) {
            auto qit = place_by_id.find(to);
            if (qit == place_by_id.end())
                throw input_error(source_name + ": arc target '" + to + "' is unknown");
            w.net.add_output_arc(tit->second, qit->second, weight);
        } else {
            throw input_error(source_name + ": arc source '" + from + "' is unknown");
        }
    }
    const std::string source_id = doc.at("source").get<std::string>();
    const std::string sink_id = doc.at("sink").get<std::string>();
    if (!place_by_id.count(source_id) || !place_by_id.count(sink_id))
        throw input_error(source_name + ": source/sink refer to unknown places");
    w.source = place_by_id.at(source_id);
    w.sink = place_by_id.at(sink_id);
    return w;
}

nlohmann::json parse_json(const std::string& content, const std::string& source_name) {
    try {
        return nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(source_name + ": " + e.what());
    }
}

} // namespace

std::string write_net_json(const WFNet& w) {
    return net_to_json_value(w).dump(2) + "\n";
}

WFNet read_net_json(const std::string& content, const std::string& source_name) {
    try {
        return net_from_json_value(parse_json(content, source_name), source_name);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(source_name + ": " + e.what());
    }
}

namespace {

bool has_extension(const std::string& path, const std::string& ext) {
    if (path.size() < ext.size()) return false;
    return std::equal(ext.rbegin(), ext.rend(), path.rbegin(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) ==
               std::tolower(static_cast<unsigned char>(b));
    });
}

} // namespace

WFNet read_net_file(const std::string& path) {
    const std::string content = read_text_file(path);
    if (has_extension(path, ".pnml") || has_extension(path, ".xml"))
        return read_pnml(content, path);
    return read_net_json(content, path);
}

void write_net_file(const WFNet& w, const std::string& path) {
    if (has_extension(path, ".pnml") || has_extension(path, ".xml"))
        write_text_file(path, write_pnml(w));
    else if (has_extension(path, ".dot"))
        write_text_file(path, write_dot(w));
    else
        write_text_file(path, write_net_json(w));
}

std::string write_dot(const WFNet& w, bool highlevel) {
    std::ostringstream out;
    out << "digraph wfnet {\n";
    out << "  rankdir=LR;\n";
    for (PlaceId p = 0; p < w.net.place_count(); ++p) {
        out << "  \"" << w.net.place(p).id << "\" [shape=circle, label=\"\"";
        if (p == w.source) out << ", xlabel=\"i\"";
        if (p == w.sink) out << ", xlabel=\"f\"";
        out << "];\n";
    }
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        const auto& tr = w.net.transition(t);
        out << "  \"" << tr.id << "\" [shape=box";
        if (tr.label) {
            out << ", label=\"" << *tr.label << "\"";
            if (highlevel) out << ", peripheries=2";
        } else {
            out << ", label=\"\", style=filled, fillcolor=black, height=0.2";
        }
        out << "];\n";
    }
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        for (const auto& arc : w.net.inputs(t)) {
            out << "  \"" << w.net.place(arc.place).id << "\" -> \"" << w.net.transition(t).id
                << "\"";
            if (arc.weight != 1) out << " [label=\"" << arc.weight << "\"]";
            out << ";\n";
        }
        for (const auto& arc : w.net.outputs(t)) {
            out << "  \"" << w.net.transition(t).id << "\" -> \"" << w.net.place(arc.place).id
                << "\"";
            if (arc.weight != 1) out << " [label=\"" << arc.weight << "\"]";
            out << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

namespace {

void dot_nodes_and_arcs(std::ostream& out, const WFNet& w, const std::string& prefix,
                        bool highlevel, const std::string& indent) {
    for (PlaceId p = 0; p < w.net.place_count(); ++p)
        out << indent << "\"" << prefix << w.net.place(p).id << "\" [shape=circle, label=\"\"];\n";
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        const auto& tr = w.net.transition(t);
        out << indent << "\"" << prefix << tr.id << "\" [shape=box";
        if (tr.label) {
            out << ", label=\"" << *tr.label << "\"";
            if (highlevel) out << ", peripheries=2";
        } else {
            out << ", label=\"\", style=filled, fillcolor=black, height=0.2";
        }
        out << "];\n";
    }
    for (TransitionId t = 0; t < w.net.transition_count(); ++t) {
        for (const auto& arc : w.net.inputs(t))
            out << indent << "\"" << prefix << w.net.place(arc.place).id << "\" -> \"" << prefix
                << w.net.transition(t).id << "\";\n";
        for (const auto& arc : w.net.outputs(t))
            out << indent << "\"" << prefix << w.net.transition(t).id << "\" -> \"" << prefix
                << w.net.place(arc.place).id << "\";\n";
    }
}

} // namespace

std::string write_hwf_dot(const HWFNet& h) {
    std::ostringstream out;
    out << "digraph hwfnet {\n  rankdir=LR;\n";
    out << "  subgraph cluster_high {\n    label=\"high level\";\n";
    dot_nodes_and_arcs(out, h.high, "high/", true, "    ");
    out << "  }\n";
    std::size_t k = 0;
    for (const auto& [name, subnet] : h.subnets) {
        out << "  subgraph cluster_sub" << k++ << " {\n    label=\"" << name << "\";\n";
        dot_nodes_and_arcs(out, subnet, name + "/", false, "    ");
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

std::string write_hwf_json(const HWFNet& h) {
    nlohmann::json doc;
    doc["high"] = net_to_json_value(h.high);
    doc["subnets"] = nlohmann::json::object();
    for (const auto& [name, subnet] : h.subnets) doc["subnets"][name] = net_to_json_value(subnet);
    return doc.dump(2) + "\n";
}

HWFNet read_hwf_json(const std::string& content, const std::string& source_name) {
    try {
        const nlohmann::json doc = parse_json(content, source_name);
        HWFNet h;
        h.high = net_from_json_value(doc.at("high"), source_name);
        for (const auto& [name, value] : doc.at("subnets").items())
            h.subnets[name] = net_from_json_value(value, source_name);
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(source_name + ": " + e.what());
    }
}

HWFNet read_hwf_file(const std::string& path) {
    return read_hwf_json(read_text_file(path), path);
}

std::string write_log_json(const EventLog& log) {
    nlohmann::json doc;
    doc["traces"] = nlohmann::json::array();
    for (const auto& [trace, count] : log.traces())
        doc["traces"].push_back({{"events", trace}, {"count", count}});
    return doc.dump(2) + "\n";
}

} // namespace hwfmine
