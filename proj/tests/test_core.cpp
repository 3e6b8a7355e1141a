#include <doctest.h>

#include <stdexcept>

#include "vbc/core.hpp"

using namespace vbc;

namespace {
PositionPoint pt(const std::string& mmsi, std::int64_t t, double lat, double lon, double sog,
                 double cog) {
    PositionPoint p;
    p.mmsi = mmsi;
    p.timestamp = t;
    p.lat = lat;
    p.lon = lon;
    p.sog = sog;
    p.cog = cog;
    return p;
}
} // namespace

TEST_CASE("behavior codes are a bijection over the 10 legal labels") {
    std::vector<bool> seen(kBehaviorCount, false);
    for (const BehaviorLabel& b : all_behaviors()) {
        CHECK(behavior_is_legal(b));
        const int code = behavior_code(b);
        REQUIRE(code >= 0);
        REQUIRE(code < kBehaviorCount);
        CHECK_FALSE(seen[code]);
        seen[code] = true;
        CHECK(behavior_from_code(code) == b);
        CHECK(behavior_from_name(behavior_name(b)) == b);
    }
    for (bool s : seen) CHECK(s);
}

TEST_CASE("stopped pairs with none and nothing else") {
    CHECK(behavior_is_legal({SpeedStatus::stopped, TurnStatus::none}));
    CHECK_FALSE(behavior_is_legal({SpeedStatus::stopped, TurnStatus::left}));
    CHECK_FALSE(behavior_is_legal({SpeedStatus::uniform, TurnStatus::none}));
    CHECK_THROWS_AS(behavior_code({SpeedStatus::stopped, TurnStatus::right}),
                    std::invalid_argument);
}

TEST_CASE("vessel type mapping is open with an 'other' catch-all") {
    CHECK(vessel_type_from_string("tanker") == VesselType::tanker);
    CHECK(vessel_type_from_string("Container") == VesselType::container);
    CHECK(vessel_type_from_string("83") == VesselType::tanker);
    CHECK(vessel_type_from_string("61") == VesselType::passenger);
    CHECK(vessel_type_from_string("sailing-yacht") == VesselType::other);
    CHECK(vessel_type_from_string("") == VesselType::other);
}

TEST_CASE("validate flags bounds violations") {
    PositionSequence seq;
    seq.mmsi = "123";
    seq.points = {pt("123", 0, 91.0, 10.0, 5.0, 90.0)};
    const auto report = validate(seq);
    REQUIRE(report.size() == 1);
    CHECK(report[0].field == "lat");
}

TEST_CASE("validate passes a well-formed sequence") {
    PositionSequence seq;
    seq.mmsi = "123";
    seq.points = {pt("123", 0, 29.9, 122.1, 10.0, 45.0), pt("123", 10, 29.91, 122.11, 10.2, 46.0),
                  pt("123", 20, 29.92, 122.12, 10.4, 47.0)};
    CHECK(validate(seq).empty());
}

TEST_CASE("validate reports duplicated timestamps as monotonicity violations") {
    PositionSequence seq;
    seq.mmsi = "123";
    seq.points = {pt("123", 100, 29.9, 122.1, 10.0, 45.0), pt("123", 100, 29.91, 122.11, 10.2, 46.0)};
    const auto report = validate(seq);
    REQUIRE(report.size() == 1);
    CHECK(report[0].field == "timestamp");
    CHECK(report[0].point_index == 1);
}

TEST_CASE("validate reports sog and cog violations") {
    PositionSequence seq;
    seq.mmsi = "1";
    seq.points = {pt("1", 0, 0.0, 0.0, -1.0, 360.0)};
    const auto report = validate(seq);
    CHECK(report.size() == 2);
}
