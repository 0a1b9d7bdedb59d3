#pragma once

#include "hwfmine/eventlog.hpp"

#include <iosfwd>
#include <string>

namespace hwfmine {

/// Reads an XES document. Only concept:name (required per event) and
/// time:timestamp (optional) are interpreted; other attributes are ignored.
/// When every event of a trace carries a timestamp, events are ordered by it
/// (stable, so equal timestamps keep document order); otherwise document
/// order is kept.
EventLog parse_xes(const std::string& content, const std::string& source_name = "<input>");

EventLog read_xes_file(const std::string& path);

/// Serializes the log as XES. Deterministic: trace variants appear in their
/// multiset order, repeated per multiplicity. Only concept:name attributes
/// are emitted, so parse_xes(write_xes(L)) == L.
std::string write_xes(const EventLog& log);

void write_xes_file(const EventLog& log, const std::string& path);

} // namespace hwfmine
