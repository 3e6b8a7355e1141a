#include "vbc/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace vbc {

std::string to_string(VesselType t) {
    switch (t) {
        case VesselType::cargo: return "cargo";
        case VesselType::container: return "container";
        case VesselType::fishing: return "fishing";
        case VesselType::other: return "other";
        case VesselType::passenger: return "passenger";
        case VesselType::tanker: return "tanker";
        case VesselType::tug: return "tug";
    }
    return "other";
}

VesselType vessel_type_from_string(const std::string& s) {
    std::string low;
    low.reserve(s.size());
    for (char c : s) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

    if (low == "cargo") return VesselType::cargo;
    if (low == "container") return VesselType::container;
    if (low == "fishing") return VesselType::fishing;
    if (low == "passenger") return VesselType::passenger;
    if (low == "tanker") return VesselType::tanker;
    if (low == "tug") return VesselType::tug;
    if (low == "other") return VesselType::other;

    // AIS numeric type codes (ITU-R M.1371 first digit scheme).
    bool numeric = !low.empty() && std::all_of(low.begin(), low.end(), [](unsigned char c) {
        return std::isdigit(c);
    });
    if (numeric) {
        int code = 0;
        try {
            code = std::stoi(low);
        } catch (const std::exception&) {
            return VesselType::other;
        }
        if (code == 30) return VesselType::fishing;
        if (code == 31 || code == 32 || code == 52) return VesselType::tug;
        if (code >= 60 && code <= 69) return VesselType::passenger;
        if (code >= 70 && code <= 79) return VesselType::cargo;
        if (code >= 80 && code <= 89) return VesselType::tanker;
    }
    return VesselType::other;
}

std::string to_string(SpeedStatus s) {
    switch (s) {
        case SpeedStatus::accelerating: return "accelerating";
        case SpeedStatus::decelerating: return "decelerating";
        case SpeedStatus::uniform: return "uniform";
        case SpeedStatus::stopped: return "stopped";
    }
    return "uniform";
}

std::string to_string(TurnStatus t) {
    switch (t) {
        case TurnStatus::left: return "left";
        case TurnStatus::right: return "right";
        case TurnStatus::straight: return "straight";
        case TurnStatus::none: return "none";
    }
    return "none";
}

bool behavior_is_legal(const BehaviorLabel& b) {
    if (b.speed == SpeedStatus::stopped) return b.turn == TurnStatus::none;
    return b.turn != TurnStatus::none;
}

namespace {
int speed_index(SpeedStatus s) {
    switch (s) {
        case SpeedStatus::accelerating: return 0;
        case SpeedStatus::decelerating: return 1;
        case SpeedStatus::uniform: return 2;
        case SpeedStatus::stopped: return 3;
    }
    return 3;
}

int turn_index(TurnStatus t) {
    switch (t) {
        case TurnStatus::left: return 0;
        case TurnStatus::right: return 1;
        case TurnStatus::straight: return 2;
        case TurnStatus::none: return 3;
    }
    return 3;
}
} // namespace

int behavior_code(const BehaviorLabel& b) {
    if (!behavior_is_legal(b))
        throw std::invalid_argument("behavior_code: illegal speed/turn combination");
    if (b.speed == SpeedStatus::stopped) return 9;
    return speed_index(b.speed) * 3 + turn_index(b.turn);
}

BehaviorLabel behavior_from_code(int code) {
    if (code < 0 || code >= kBehaviorCount)
        throw std::invalid_argument("behavior_from_code: code out of range");
    if (code == 9) return BehaviorLabel{SpeedStatus::stopped, TurnStatus::none};
    static const SpeedStatus speeds[3] = {SpeedStatus::accelerating, SpeedStatus::decelerating,
                                          SpeedStatus::uniform};
    static const TurnStatus turns[3] = {TurnStatus::left, TurnStatus::right, TurnStatus::straight};
    return BehaviorLabel{speeds[code / 3], turns[code % 3]};
}

std::string behavior_name(const BehaviorLabel& b) {
    if (b.speed == SpeedStatus::stopped) return "stopped";
    return to_string(b.speed) + "_" + to_string(b.turn);
}

std::optional<BehaviorLabel> behavior_from_name(const std::string& name) {
    for (int c = 0; c < kBehaviorCount; ++c) {
        BehaviorLabel b = behavior_from_code(c);
        if (behavior_name(b) == name) return b;
    }
    return std::nullopt;
}

std::vector<BehaviorLabel> all_behaviors() {
    std::vector<BehaviorLabel> out;
    out.reserve(kBehaviorCount);
    for (int c = 0; c < kBehaviorCount; ++c) out.push_back(behavior_from_code(c));
    return out;
}

std::vector<Violation> validate(const PositionSequence& seq) {
    std::vector<Violation> report;
    for (std::size_t i = 0; i < seq.points.size(); ++i) {
        const PositionPoint& p = seq.points[i];
        if (!std::isfinite(p.lat) || p.lat < -90.0 || p.lat > 90.0)
            report.push_back({i, "lat", "latitude out of [-90, 90]"});
        if (!std::isfinite(p.lon) || p.lon < -180.0 || p.lon > 180.0)
            report.push_back({i, "lon", "longitude out of [-180, 180]"});
        if (!std::isfinite(p.sog) || p.sog < 0.0)
            report.push_back({i, "sog", "speed over ground negative or non-finite"});
        if (!std::isfinite(p.cog) || p.cog < 0.0 || p.cog >= 360.0)
            report.push_back({i, "cog", "course over ground not in [0, 360)"});
        if (p.mmsi != seq.mmsi)
            report.push_back({i, "mmsi", "point mmsi differs from sequence mmsi"});
        if (i > 0 && p.timestamp <= seq.points[i - 1].timestamp)
            report.push_back({i, "timestamp", "timestamps not strictly increasing"});
    }
    return report;
}

} // namespace vbc
