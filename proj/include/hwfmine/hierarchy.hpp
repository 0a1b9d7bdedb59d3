#pragma once

#include "hwfmine/petri.hpp"

#include <map>
#include <optional>
#include <string>

namespace hwfmine {

/// Two-level workflow net: a high-level WF-net whose visible transition
/// labels name sub-processes, plus one low-level WF-net per sub-process.
struct HWFNet {
    WFNet high;
    std::map<std::string, WFNet> subnets;

    /// Empty if well-formed: both levels are structural WF-nets, every
    /// visible high-level label has a subnet, and subnet alphabets are
    /// pairwise disjoint.
    std::optional<std::string> violation() const;
};

/// Inlines every sub-process net in place of its high-level transition. The
/// copy's source place is fused with all input places of the transition and
/// its sink with all output places; silent high-level transitions stay.
/// Throws input_error when a visible label has no subnet.
WFNet flatten(const HWFNet& h);

/// Wraps a body net into a one-or-more-times loop: silent entry and exit
/// transitions around the body plus a silent back edge from the body's sink
/// to its source.
WFNet make_loop(const WFNet& body);

/// Replaces every transition carrying `label` with a fresh copy of `sub`,
/// fused exactly like flatten does. Zero matches leave the net unchanged.
WFNet substitute(const WFNet& net, const Activity& label, const WFNet& sub);

/// Enumerates observable runs of the HWF-net by its own operational
/// semantics (started sub-processes interleave; a high-level firing
/// completes when its sub-process reaches its final marking). Independent of
/// flatten, so the two can be checked against each other.
RunSet hwf_runs_upto(const HWFNet& h, std::size_t max_len, std::size_t state_budget);

} // namespace hwfmine
