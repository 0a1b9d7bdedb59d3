#pragma once

#include "hwfmine/eventlog.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hwfmine {

using PlaceId = std::size_t;
using TransitionId = std::size_t;

/// Token distribution over the places of one net, indexed by PlaceId.
class Marking {
public:
    Marking() = default;
    explicit Marking(std::size_t place_count) : tokens_(place_count, 0) {}

    std::uint32_t operator[](PlaceId p) const { return tokens_[p]; }
    std::uint32_t& operator[](PlaceId p) { return tokens_[p]; }
    std::size_t place_count() const { return tokens_.size(); }

    std::uint64_t total_tokens() const;

    /// Multiset inclusion: this(p) <= other(p) for every place.
    bool subset_of(const Marking& other) const;

    auto operator<=>(const Marking&) const = default;

private:
    std::vector<std::uint32_t> tokens_;
};

/// Transitions are labeled with an activity or are silent (no label).
struct Transition {
    std::string id;
    std::optional<Activity> label; // nullopt = τ

    bool silent() const { return !label.has_value(); }
};

struct Place {
    std::string id;
};

struct Arc {
    PlaceId place;
    std::uint32_t weight;
};

/// A labeled Petri net over integer place/transition handles. Arcs are kept
/// per transition as preset/postset lists.
class LabeledPetriNet {
public:
    PlaceId add_place(std::string id = "");
    TransitionId add_transition(std::optional<Activity> label, std::string id = "");

    void add_input_arc(PlaceId p, TransitionId t, std::uint32_t weight = 1);
    void add_output_arc(TransitionId t, PlaceId p, std::uint32_t weight = 1);

    std::size_t place_count() const { return places_.size(); }
    std::size_t transition_count() const { return transitions_.size(); }

    const Place& place(PlaceId p) const { return places_[p]; }
    Place& place(PlaceId p) { return places_[p]; }
    const Transition& transition(TransitionId t) const { return transitions_[t]; }
    Transition& transition(TransitionId t) { return transitions_[t]; }

    const std::vector<Arc>& inputs(TransitionId t) const { return inputs_[t]; }
    const std::vector<Arc>& outputs(TransitionId t) const { return outputs_[t]; }

    /// All visible labels occurring in the net.
    std::set<Activity> label_alphabet() const;

private:
    std::vector<Place> places_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<Arc>> inputs_;  // per transition: consumed places
    std::vector<std::vector<Arc>> outputs_; // per transition: produced places
};

/// Petri net with a dedicated source and sink place. The initial marking is
/// one token on the source.
struct WFNet {
    LabeledPetriNet net;
    PlaceId source = 0;
    PlaceId sink = 0;

    Marking initial_marking() const;
    Marking final_marking() const;

    /// Empty when the structural WF-net conditions hold, else a description
    /// of the first violation: •source = ∅, sink• = ∅, source ≠ sink, and
    /// every node on a path from source to sink.
    std::optional<std::string> structural_violation() const;
};

std::vector<TransitionId> enabled(const LabeledPetriNet& net, const Marking& m);

bool is_enabled(const LabeledPetriNet& net, const Marking& m, TransitionId t);

/// Fires an enabled transition. Throws hwfmine::error if t is not enabled.
Marking fire(const LabeledPetriNet& net, const Marking& m, TransitionId t);

struct ReachabilityResult {
    std::vector<Marking> markings;
    bool truncated = false; // state budget was hit before the closure finished
};

ReachabilityResult reachable_markings(const LabeledPetriNet& net, const Marking& m0,
                                      std::size_t state_budget);

enum class Soundness { sound, violation, inconclusive };

struct SoundnessResult {
    Soundness verdict = Soundness::inconclusive;
    std::string detail;
};

/// Verifies the three soundness conditions by explicit state-space
/// exploration: option to complete, proper completion, no dead transitions.
/// Exceeding the budget yields `inconclusive`.
SoundnessResult check_soundness(const WFNet& w, std::size_t state_budget);

/// All observable sequences of length <= max_len, each flagged with whether
/// some firing sequence producing it reaches the final marking exactly.
struct RunSet {
    std::map<Trace, bool> runs; // sequence -> reaches [f]
    bool truncated = false;

    bool contains_final(const Trace& t) const {
        auto it = runs.find(t);
        return it != runs.end() && it->second;
    }
};

RunSet runs_upto(const WFNet& w, std::size_t max_len, std::size_t state_budget);

struct PlayoutOptions {
    std::size_t max_len = 1000;   // observable events per trace
    std::uint64_t seed = 0;
    std::size_t retries = 1000;   // resampling attempts per trace
};

/// Samples traces by uniformly random firing until the final marking.
/// Attempts that miss [f] within max_len observable events (or stall in
/// silent cycles) are resampled; every emitted trace perfectly fits w.
/// Throws budget_error when an individual trace exhausts its retries.
EventLog playout(const WFNet& w, std::size_t n_traces, const PlayoutOptions& options);

} // namespace hwfmine
