#include "vbc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "vbc/geo.hpp"

namespace vbc {

std::string to_string(Archetype a) {
    switch (a) {
        case Archetype::ferry: return "ferry";
        case Archetype::liner: return "liner";
        case Archetype::tramp: return "tramp";
    }
    return "tramp";
}

RegimeTrack gen_regime_track(const std::vector<RegimeSpec>& regimes, double noise_sog,
                             std::uint64_t seed, const GenOptions& opts) {
    if (regimes.empty()) throw std::invalid_argument("gen_regime_track: no regimes");
    for (const RegimeSpec& r : regimes)
        if (r.duration < 2) throw std::invalid_argument("gen_regime_track: regime too short");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    RegimeTrack out;
    out.seq.mmsi = "900000001";
    out.seq.vessel_type = VesselType::other;

    double lat = opts.start_lat;
    double lon = opts.start_lon;
    std::int64_t t = opts.start_time;
    std::size_t index = 0;

    for (std::size_t ri = 0; ri < regimes.size(); ++ri) {
        const RegimeSpec& r = regimes[ri];
        out.labels.push_back(r.behavior);
        if (ri > 0) out.boundaries.push_back(index);

        const double span = static_cast<double>(r.duration - 1);
        for (std::size_t j = 0; j < r.duration; ++j) {
            const double progress = span > 0.0 ? static_cast<double>(j) / span : 0.0;

            double sog = r.base_sog;
            if (r.behavior.speed == SpeedStatus::accelerating)
                sog += opts.ramp_knots * progress;
            else if (r.behavior.speed == SpeedStatus::decelerating)
                sog -= opts.ramp_knots * progress;
            if (noise_sog > 0.0) sog += noise_sog * noise(rng);
            sog = std::max(0.0, sog);

            double turn_dir = 0.0;
            if (r.behavior.turn == TurnStatus::left) turn_dir = -1.0;
            else if (r.behavior.turn == TurnStatus::right) turn_dir = 1.0;
            double cog = r.base_cog + turn_dir * opts.turn_deg * progress;
            if (opts.cog_jitter_deg > 0.0) cog += opts.cog_jitter_deg * noise(rng);
            cog = wrap_course_deg(cog);

            PositionPoint p;
            p.mmsi = out.seq.mmsi;
            p.timestamp = t;
            p.lat = lat;
            p.lon = lon;
            p.sog = sog;
            p.cog = cog;
            p.vessel_type = out.seq.vessel_type;
            out.seq.points.push_back(p);

            const double v = sog * kKnotsToMps;
            advance_local(lat, lon, v * opts.cadence_s * std::cos(deg2rad(cog)),
                          v * opts.cadence_s * std::sin(deg2rad(cog)));
            t += static_cast<std::int64_t>(opts.cadence_s);
            ++index;
        }
    }
    return out;
}

namespace {

struct ArchetypeParams {
    double cruise_knots;
    std::size_t dwell_points;
    double arc_deg; // total course swing of a leg; liners sail curved routes
    VesselType type;
};

ArchetypeParams params_for(Archetype a) {
    switch (a) {
        case Archetype::ferry: return {18.0, 20, 0.0, VesselType::passenger};
        case Archetype::liner: return {13.0, 40, 65.0, VesselType::container};
        case Archetype::tramp: return {11.5, 140, 0.0, VesselType::tanker};
    }
    return {11.5, 140, 0.0, VesselType::tanker};
}

class VesselBuilder {
public:
    VesselBuilder(const FleetConfig& cfg, std::string mmsi, VesselType type, std::uint64_t seed)
        : cfg_(cfg), rng_(seed), noise_(0.0, 1.0) {
        seq_.mmsi = std::move(mmsi);
        seq_.vessel_type = type;
        t_ = cfg.opts.start_time;
    }

    void moor_at(const Port& port, std::size_t dwell_points, std::vector<std::string>& schedule) {
        lat_ = port.lat;
        lon_ = port.lon;
        schedule.push_back(port.id);
        for (std::size_t j = 0; j < dwell_points; ++j) {
            // Small berth jitter, well inside any sane matching radius.
            const double jn = 12.0 * noise_(rng_);
            const double je = 12.0 * noise_(rng_);
            double plat = port.lat, plon = port.lon;
            advance_local(plat, plon, jn, je);
            emit(plat, plon, std::max(0.05, 0.2 + 0.05 * noise_(rng_)), cog_);
        }
        lat_ = port.lat;
        lon_ = port.lon;
    }

    void transit_to(const Port& port, double cruise_knots, double arc_deg) {
        const double chord = haversine_m(lat_, lon_, port.lat, port.lon);
        if (chord < 1.0) return;
        const double bearing = bearing_deg(lat_, lon_, port.lat, port.lon);
        const double dt = cfg_.opts.cadence_s;
        const std::size_t q = std::max<std::size_t>(1, cfg_.quantum);

        // Circular-arc leg: the course swings arc_eff in total and the chord
        // bearing bisects it. arc_deg = 0 degenerates to a straight line; a
        // nonzero arc is widened on long legs so every pre-segment span keeps
        // a clear per-window course change.
        const double nominal_mps = cruise_knots * kKnotsToMps;
        const double min_mps = 11.0 * kKnotsToMps;
        const double max_mps = 19.5 * kKnotsToMps;

        // Steps quantized to the pre-segment stride; effective speed must not
        // dip into the stop band, so adjust the step count when needed. Legs
        // hold constant speed, which keeps every transit segment in the
        // uniform class; the boarding jump stays under the default ingestion
        // repair threshold.
        auto quantize_steps = [&](double path_len) {
            double steps_nom = path_len / (nominal_mps * dt);
            std::size_t steps =
                static_cast<std::size_t>(std::llround(steps_nom / static_cast<double>(q))) * q;
            if (steps < q) steps = q;
            while (steps > q && path_len / (static_cast<double>(steps) * dt) < min_mps)
                steps -= q;
            while (path_len / (static_cast<double>(steps) * dt) > max_mps) steps += q;
            return steps;
        };
        auto arc_path = [&](double arc) {
            const double half = deg2rad(arc) / 2.0;
            return std::abs(half) < 1e-9 ? chord : chord * half / std::sin(half);
        };

        double arc_eff = arc_deg;
        double path_len = arc_path(arc_eff);
        std::size_t steps = quantize_steps(path_len);
        if (arc_deg != 0.0) {
            const double per_window = 20.0; // degrees of course change per stride span
            const double needed = per_window * static_cast<double>(steps) / static_cast<double>(q);
            if (std::abs(arc_eff) < needed) {
                arc_eff = (arc_deg < 0.0 ? -needed : needed);
                path_len = arc_path(arc_eff);
                steps = quantize_steps(path_len);
            }
        }

        const double cruise_mps = path_len / (static_cast<double>(steps) * dt);
        double plat = lat_, plon = lon_;
        for (std::size_t s = 0; s < steps; ++s) {
            const double course = wrap_course_deg(
                bearing - arc_eff / 2.0 +
                arc_eff * (static_cast<double>(s) + 0.5) / static_cast<double>(steps));
            double sog = cruise_mps / kKnotsToMps;
            if (cfg_.sog_noise > 0.0) sog = std::max(0.0, sog + cfg_.sog_noise * noise_(rng_));
            cog_ = course;
            emit(plat, plon, sog, course);
            const double v = cruise_mps * dt; // noiseless advance keeps arrival exact
            advance_local(plat, plon, v * std::cos(deg2rad(course)),
                          v * std::sin(deg2rad(course)));
        }
        lat_ = plat;
        lon_ = plon;
    }

    std::size_t size() const { return seq_.points.size(); }
    PositionSequence take() { return std::move(seq_); }
    std::mt19937_64& rng() { return rng_; }

private:
    void emit(double lat, double lon, double sog, double cog) {
        PositionPoint p;
        p.mmsi = seq_.mmsi;
        p.timestamp = t_;
        p.lat = lat;
        p.lon = lon;
        p.sog = sog;
        p.cog = wrap_course_deg(cog);
        p.vessel_type = seq_.vessel_type;
        seq_.points.push_back(std::move(p));
        t_ += static_cast<std::int64_t>(cfg_.opts.cadence_s);
    }

    const FleetConfig& cfg_;
    PositionSequence seq_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_;
    double lat_ = 0.0, lon_ = 0.0, cog_ = 0.0;
    std::int64_t t_ = 0;
};

FleetVessel build_vessel(const FleetConfig& cfg, Archetype a, int index, std::uint64_t seed) {
    const ArchetypeParams ap = params_for(a);
    char mmsi[16];
    std::snprintf(mmsi, sizeof(mmsi), "%d%08d", 1 + static_cast<int>(a), 100 + index);
    VesselBuilder b(cfg, mmsi, ap.type, seed);

    FleetVessel v;
    v.archetype = a;

    std::size_t port_cursor = 0;
    std::uniform_int_distribution<std::size_t> pick(0, cfg.ports.size() - 1);

    auto next_port = [&]() -> const Port& {
        switch (a) {
            case Archetype::ferry:
                port_cursor = (port_cursor + 1) % 2;
                return cfg.ports[port_cursor];
            case Archetype::liner:
                port_cursor = (port_cursor + 1) % cfg.ports.size();
                return cfg.ports[port_cursor];
            case Archetype::tramp: {
                std::size_t p = pick(b.rng());
                if (p == port_cursor) p = (p + 1) % cfg.ports.size();
                port_cursor = p;
                return cfg.ports[port_cursor];
            }
        }
        return cfg.ports[0];
    };

    b.moor_at(cfg.ports[port_cursor], ap.dwell_points, v.port_schedule);
    while (b.size() < cfg.target_points) {
        const Port& target = next_port();
        b.transit_to(target, ap.cruise_knots, ap.arc_deg);
        b.moor_at(target, ap.dwell_points, v.port_schedule);
    }
    v.seq = b.take();
    return v;
}

} // namespace

std::vector<FleetVessel> gen_fleet(const FleetConfig& cfg) {
    if (cfg.ports.size() < 2)
        throw std::invalid_argument("gen_fleet: need at least 2 ports");
    std::vector<FleetVessel> out;
    int idx = 0;
    for (int i = 0; i < cfg.n_ferry; ++i, ++idx)
        out.push_back(build_vessel(cfg, Archetype::ferry, idx, cfg.seed * 1000003 + idx));
    for (int i = 0; i < cfg.n_liner; ++i, ++idx)
        out.push_back(build_vessel(cfg, Archetype::liner, idx, cfg.seed * 1000003 + idx));
    for (int i = 0; i < cfg.n_tramp; ++i, ++idx)
        out.push_back(build_vessel(cfg, Archetype::tramp, idx, cfg.seed * 1000003 + idx));
    return out;
}

FleetVessel gen_switch_vessel(const FleetConfig& cfg, std::uint64_t seed_offset) {
    if (cfg.ports.size() < 3)
        throw std::invalid_argument("gen_switch_vessel: need at least 3 ports");
    const ArchetypeParams ferry = params_for(Archetype::ferry);
    const ArchetypeParams tramp = params_for(Archetype::tramp);

    VesselBuilder b(cfg, "499000001", VesselType::other, cfg.seed * 1000003 + seed_offset);
    FleetVessel v;
    v.archetype = Archetype::ferry; // starting character

    // Ferry-like first half: fast shuttling, short dwells.
    std::size_t cursor = 0;
    b.moor_at(cfg.ports[0], ferry.dwell_points, v.port_schedule);
    while (b.size() < cfg.target_points / 2) {
        cursor = (cursor + 1) % 2;
        b.transit_to(cfg.ports[cursor], ferry.cruise_knots, ferry.arc_deg);
        b.moor_at(cfg.ports[cursor], ferry.dwell_points, v.port_schedule);
    }
    // Tramp-like second half: slow legs, long dwells.
    std::size_t half_target = b.size() + cfg.target_points / 2;
    std::size_t k = 2;
    while (b.size() < half_target) {
        const Port& target = cfg.ports[k % cfg.ports.size()];
        ++k;
        b.transit_to(target, tramp.cruise_knots, tramp.arc_deg);
        b.moor_at(target, tramp.dwell_points, v.port_schedule);
    }
    v.seq = b.take();
    return v;
}

} // namespace vbc
