#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vbc/core.hpp"

namespace vbc {

struct GenOptions {
    double cadence_s = 10.0;
    double start_lat = 30.0;
    double start_lon = 122.0;
    std::int64_t start_time = 1600000000;
    double ramp_knots = 6.0;  // total sog swing of an accelerating/decelerating regime
    double turn_deg = 40.0;   // total course swing of a turning regime
    double cog_jitter_deg = 0.0;
};

struct RegimeSpec {
    BehaviorLabel behavior;
    std::size_t duration = 0; // points
    double base_sog = 10.0;   // knots
    double base_cog = 90.0;   // degrees
};

struct RegimeTrack {
    PositionSequence seq;
    std::vector<std::size_t> boundaries;  // start index of every regime after the first
    std::vector<BehaviorLabel> labels;    // one per regime, in order
};

// Dead-reckoned track with piecewise-constant planted behaviors and Gaussian
// sog noise. Deterministic given seed and config.
RegimeTrack gen_regime_track(const std::vector<RegimeSpec>& regimes, double noise_sog,
                             std::uint64_t seed, const GenOptions& opts = {});

enum class Archetype { ferry, liner, tramp };

std::string to_string(Archetype a);

struct FleetConfig {
    std::vector<Port> ports; // >= 2 for ferry/liner
    int n_ferry = 10;
    int n_liner = 10;
    int n_tramp = 10;
    std::uint64_t seed = 1;
    std::size_t target_points = 300; // per vessel, approximate
    double sog_noise = 0.05;
    // Leg and dwell durations are multiples of this many points, so planted
    // mooring boundaries line up with pre-segmentation cut candidates.
    std::size_t quantum = 20;
    GenOptions opts;
};

struct FleetVessel {
    PositionSequence seq;
    Archetype archetype;
    std::vector<std::string> port_schedule; // ports dwelled at, in order
};

// Ferries shuttle between the first two ports, liners run the full port
// rotation, tramps pick ports at random and dwell long. Vessel types:
// ferry=passenger, liner=container, tramp=tanker.
std::vector<FleetVessel> gen_fleet(const FleetConfig& cfg);

// One vessel that behaves like a ferry for the first half of its voyage and
// like a tramp for the second half.
FleetVessel gen_switch_vessel(const FleetConfig& cfg, std::uint64_t seed_offset = 9000);

} // namespace vbc
