#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vbc/core.hpp"

namespace vbc {

struct PortRegistry {
    std::vector<Port> ports;
    double sigma = 2000.0; // matching radius, meters
};

void check_registry(const PortRegistry& registry);

// Predicate over behavior labels; the flagship case is mooring (stopped).
using BehaviorPredicate = std::function<bool(const BehaviorLabel&)>;

BehaviorPredicate stopped_predicate();
BehaviorPredicate behavior_equals(const BehaviorLabel& b);

// Segments whose behavior satisfies the predicate, order preserved.
std::vector<SubTrajectory> filter_behavior(const std::vector<SubTrajectory>& segments,
                                           const BehaviorPredicate& pred);

// Degree-of-match function F: great-circle meters between a point and a port.
double match_distance(const PositionPoint& point, const Port& port);
double match_distance(double lat, double lon, const Port& port);

// Maps one segment to its label point, or nothing when no port is within
// sigma. With one matching port the label point sits at the first in-radius
// point; with several, ports compete on their middle in-radius point
// (index floor(count/2), time order) and the closest wins.
// source_segment is left for the caller to fill.
std::optional<LabelPoint> select_label_point(const SubTrajectory& segment,
                                             const PortRegistry& registry);

// One vessel's mooring visit: which port, by which vessel type.
struct Mooring {
    std::string port_id;
    VesselType vessel_type = VesselType::other;
};

// Sets each port's category to the vessel type with the most moorings there;
// ties break toward the lexicographically smallest type name. Ports with no
// moorings stay uncategorized (reported as "unassigned").
void categorize_berths(const std::vector<Mooring>& moorings, PortRegistry& registry);

std::string port_category_name(const Port& port);

// Full Algorithm-2 pass: per vessel, select label points of the chosen
// behavior, categorize berths over the whole fleet, then emit per-vessel
// label sequences (time-ordered; vessels with no label points are omitted).
// Sequences sharing an mmsi (slices of one vessel) are merged.
std::vector<LabelSequence> build_label_sequences(
    const std::vector<std::pair<PositionSequence, std::vector<SubTrajectory>>>& trajectories,
    PortRegistry& registry, const BehaviorPredicate& pred);

} // namespace vbc
