#include "vbc/label_seq.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "vbc/geo.hpp"

namespace vbc {

void check_registry(const PortRegistry& registry) {
    if (registry.sigma <= 0.0) throw std::invalid_argument("PortRegistry: sigma must be positive");
    std::set<std::string> ids;
    for (const Port& p : registry.ports) {
        if (!ids.insert(p.id).second)
            throw std::invalid_argument("PortRegistry: duplicate port id '" + p.id + "'");
        if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0)
            throw std::invalid_argument("PortRegistry: port '" + p.id + "' out of bounds");
    }
}

BehaviorPredicate stopped_predicate() {
    return [](const BehaviorLabel& b) { return b.speed == SpeedStatus::stopped; };
}

BehaviorPredicate behavior_equals(const BehaviorLabel& want) {
    return [want](const BehaviorLabel& b) { return b == want; };
}

std::vector<SubTrajectory> filter_behavior(const std::vector<SubTrajectory>& segments,
                                           const BehaviorPredicate& pred) {
    std::vector<SubTrajectory> out;
    for (const SubTrajectory& s : segments)
        if (pred(s.behavior)) out.push_back(s);
    return out;
}

double match_distance(double lat, double lon, const Port& port) {
    return haversine_m(lat, lon, port.lat, port.lon);
}

double match_distance(const PositionPoint& point, const Port& port) {
    return match_distance(point.lat, point.lon, port);
}

std::optional<LabelPoint> select_label_point(const SubTrajectory& segment,
                                             const PortRegistry& registry) {
    struct PortMatch {
        const Port* port;
        const PositionPoint* first;
        const PositionPoint* mid;
    };
    std::vector<PortMatch> matches;

    for (const Port& port : registry.ports) {
        std::vector<const PositionPoint*> in_radius;
        for (const PositionPoint& p : segment.points)
            if (match_distance(p, port) <= registry.sigma) in_radius.push_back(&p);
        if (in_radius.empty()) continue;
        matches.push_back({&port, in_radius.front(), in_radius[in_radius.size() / 2]});
    }

    if (matches.empty()) return std::nullopt;

    const PortMatch* chosen = &matches.front();
    if (matches.size() >= 2) {
        double best = std::numeric_limits<double>::infinity();
        for (const PortMatch& m : matches) {
            const double d = match_distance(*m.mid, *m.port);
            if (d < best) {
                best = d;
                chosen = &m;
            }
        }
    }

    LabelPoint lp;
    lp.lat = chosen->first->lat;
    lp.lon = chosen->first->lon;
    lp.timestamp = chosen->first->timestamp;
    lp.port_id = chosen->port->id;
    return lp;
}

void categorize_berths(const std::vector<Mooring>& moorings, PortRegistry& registry) {
    std::map<std::string, std::map<std::string, std::size_t>> counts; // port -> type name -> n
    for (const Mooring& m : moorings) ++counts[m.port_id][to_string(m.vessel_type)];

    for (Port& port : registry.ports) {
        auto it = counts.find(port.id);
        if (it == counts.end() || it->second.empty()) {
            port.category.reset();
            continue;
        }
        // std::map iterates names in lexicographic order, so the first maximal
        // count is the tie-break winner.
        std::string best_name;
        std::size_t best_count = 0;
        for (const auto& [name, cnt] : it->second) {
            if (cnt > best_count) {
                best_count = cnt;
                best_name = name;
            }
        }
        port.category = vessel_type_from_string(best_name);
    }
}

std::string port_category_name(const Port& port) {
    return port.category ? to_string(*port.category) : "unassigned";
}

std::vector<LabelSequence> build_label_sequences(
    const std::vector<std::pair<PositionSequence, std::vector<SubTrajectory>>>& trajectories,
    PortRegistry& registry, const BehaviorPredicate& pred) {
    check_registry(registry);

    struct Selected {
        LabelPoint point;
        VesselType vessel_type;
    };
    // Keyed by mmsi so slices of one vessel merge; map keeps output order
    // independent of input permutation.
    std::map<std::string, std::vector<Selected>> per_vessel;
    std::map<std::string, VesselType> vessel_types;
    std::vector<Mooring> moorings;

    for (const auto& [seq, segments] : trajectories) {
        for (std::size_t si = 0; si < segments.size(); ++si) {
            if (!pred(segments[si].behavior)) continue;
            std::optional<LabelPoint> lp = select_label_point(segments[si], registry);
            if (!lp) continue; // no port in radius: segment dropped
            lp->source_segment = si;
            per_vessel[seq.mmsi].push_back({*lp, seq.vessel_type});
            moorings.push_back({lp->port_id, seq.vessel_type});
        }
        vessel_types[seq.mmsi] = seq.vessel_type;
    }

    categorize_berths(moorings, registry);
    std::map<std::string, const Port*> port_by_id;
    for (const Port& p : registry.ports) port_by_id[p.id] = &p;

    std::vector<LabelSequence> out;
    for (auto& [mmsi, selected] : per_vessel) {
        std::stable_sort(selected.begin(), selected.end(), [](const Selected& a, const Selected& b) {
            return a.point.timestamp < b.point.timestamp;
        });
        LabelSequence ls;
        ls.mmsi = mmsi;
        ls.vessel_type = vessel_types[mmsi];
        for (Selected& s : selected) {
            const Port* port = port_by_id.at(s.point.port_id);
            s.point.port_label = port->category.value_or(VesselType::other);
            ls.label_points.push_back(s.point);
        }
        if (!ls.label_points.empty()) out.push_back(std::move(ls));
    }
    return out;
}

} // namespace vbc
