#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vbc {

enum class VesselType {
    cargo,
    container,
    fishing,
    other,
    passenger,
    tanker,
    tug,
};

std::string to_string(VesselType t);
// Open mapping: unknown names and AIS numeric type codes fall back to `other`.
VesselType vessel_type_from_string(const std::string& s);

struct PositionPoint {
    std::string mmsi;
    std::int64_t timestamp = 0; // epoch seconds
    double lat = 0.0;           // degrees, [-90, 90]
    double lon = 0.0;           // degrees, [-180, 180]
    double sog = 0.0;           // knots, >= 0
    double cog = 0.0;           // degrees, [0, 360)
    VesselType vessel_type = VesselType::other;
};

struct PositionSequence {
    std::string mmsi;
    VesselType vessel_type = VesselType::other;
    std::vector<PositionPoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

enum class SpeedStatus { accelerating, decelerating, uniform, stopped };
enum class TurnStatus { left, right, straight, none };

std::string to_string(SpeedStatus s);
std::string to_string(TurnStatus t);

// One of the 10 legal speed/turn combinations. turn == none iff speed == stopped.
struct BehaviorLabel {
    SpeedStatus speed = SpeedStatus::uniform;
    TurnStatus turn = TurnStatus::straight;

    bool operator==(const BehaviorLabel&) const = default;
};

inline constexpr int kBehaviorCount = 10;

bool behavior_is_legal(const BehaviorLabel& b);
// Bijective over the 10 legal labels: codes 0..8 are (speed x turn), 9 is stopped.
int behavior_code(const BehaviorLabel& b);
BehaviorLabel behavior_from_code(int code);
std::string behavior_name(const BehaviorLabel& b);
std::optional<BehaviorLabel> behavior_from_name(const std::string& name);
// All 10 legal labels in code order.
std::vector<BehaviorLabel> all_behaviors();

struct SubTrajectory {
    std::string parent_mmsi;
    std::size_t start_index = 0; // inclusive, into the parent sequence
    std::size_t end_index = 0;   // inclusive
    std::vector<PositionPoint> points;
    BehaviorLabel behavior;

    std::size_t size() const { return points.size(); }
};

struct LabelPoint {
    std::size_t source_segment = 0; // index of the originating SubTrajectory
    double lat = 0.0;
    double lon = 0.0;
    std::int64_t timestamp = 0;
    std::string port_id;
    VesselType port_label = VesselType::other; // berth category
};

struct LabelSequence {
    std::string mmsi;
    VesselType vessel_type = VesselType::other;
    std::vector<LabelPoint> label_points;
};

struct Port {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    // Dominant vessel type of the berth; empty until categorize_berths runs.
    std::optional<VesselType> category;
};

struct Violation {
    std::size_t point_index = 0; // index into points, or npos-style 0 for sequence-level issues
    std::string field;
    std::string message;
};

// Report-producing validation of all type invariants; never throws.
std::vector<Violation> validate(const PositionSequence& seq);

} // namespace vbc
