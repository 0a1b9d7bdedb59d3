#pragma once

#include "hwfmine/eventlog.hpp"
#include "hwfmine/hierarchy.hpp"
#include "hwfmine/petri.hpp"

#include <string>

namespace hwfmine {

/// PNML subset: places (with initialMarking), transitions (a <name> text is
/// the label; no <name> means silent), weighted arcs. The source/sink places
/// are recovered structurally on load.
std::string write_pnml(const WFNet& w, const std::string& net_id = "net");
WFNet read_pnml(const std::string& content, const std::string& source_name = "<input>");

/// JSON mirror of the net type.
std::string write_net_json(const WFNet& w);
WFNet read_net_json(const std::string& content, const std::string& source_name = "<input>");

/// Loads a net by file extension: .pnml/.xml as PNML, anything else as JSON.
WFNet read_net_file(const std::string& path);
void write_net_file(const WFNet& w, const std::string& path);

/// Graphviz rendering: places as circles, transitions as boxes, silent
/// transitions filled. Labels that name sub-processes can be drawn with a
/// double contour via `highlevel`.
std::string write_dot(const WFNet& w, bool highlevel = false);

/// One document with the high-level net (double-contoured transitions) and
/// each subnet as a cluster.
std::string write_hwf_dot(const HWFNet& h);

/// HWF-net JSON: {"high": <net>, "subnets": {"name": <net>, ...}}.
std::string write_hwf_json(const HWFNet& h);
HWFNet read_hwf_json(const std::string& content, const std::string& source_name = "<input>");
HWFNet read_hwf_file(const std::string& path);

/// Event-log JSON for debug dumps: {"traces": [{"events": [...], "count": n}]}.
std::string write_log_json(const EventLog& log);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace hwfmine
