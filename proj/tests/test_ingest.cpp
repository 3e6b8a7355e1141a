#include <doctest.h>

#include <random>
#include <sstream>

#include "vbc/errors.hpp"
#include "vbc/ingest.hpp"
#include "vbc/jsonl.hpp"

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

PositionSequence make_seq(const std::string& mmsi, std::size_t n, std::int64_t dt = 10) {
    PositionSequence s;
    s.mmsi = mmsi;
    for (std::size_t i = 0; i < n; ++i)
        s.points.push_back(pt(mmsi, static_cast<std::int64_t>(i) * dt, 30.0 + 1e-4 * i,
                              122.0 + 1e-4 * i, 10.0, 45.0));
    return s;
}
} // namespace

TEST_CASE("parse_ais_csv maps a well-formed row directly") {
    std::istringstream in(
        "mmsi,timestamp,lat,lon,sog,cog,vessel_type\n"
        "123456789,1425168000,29.95,122.10,12.4,87.0,container\n");
    ParseStats stats;
    const auto pts = parse_ais_csv(in, CsvSchema{}, &stats);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].mmsi == "123456789");
    CHECK(pts[0].timestamp == 1425168000);
    CHECK(pts[0].lat == doctest::Approx(29.95));
    CHECK(pts[0].lon == doctest::Approx(122.10));
    CHECK(pts[0].sog == doctest::Approx(12.4));
    CHECK(pts[0].cog == doctest::Approx(87.0));
    CHECK(pts[0].vessel_type == VesselType::container);
    CHECK(stats.rows_kept == 1);
}

TEST_CASE("parse_ais_csv skips out-of-bounds rows and counts them") {
    std::istringstream in(
        "mmsi,timestamp,lat,lon,sog,cog,vessel_type\n"
        "1,100,29.0,190.0,5.0,10.0,tanker\n"
        "1,110,29.0,122.0,5.0,10.0,tanker\n");
    ParseStats stats;
    const auto pts = parse_ais_csv(in, CsvSchema{}, &stats);
    CHECK(pts.size() == 1);
    CHECK(stats.rows_out_of_bounds == 1);
}

TEST_CASE("parse_ais_csv: header-only file yields empty list, zero errors") {
    std::istringstream in("mmsi,timestamp,lat,lon,sog,cog,vessel_type\n");
    ParseStats stats;
    CHECK(parse_ais_csv(in, CsvSchema{}, &stats).empty());
    CHECK(stats.rows_malformed == 0);
    CHECK(stats.rows_out_of_bounds == 0);
}

TEST_CASE("parse_ais_csv: missing required column is fatal") {
    std::istringstream in("mmsi,timestamp,lat,lon,sog,cog\n1,2,3,4,5,6\n");
    CHECK_THROWS_AS(parse_ais_csv(in, CsvSchema{}, nullptr), DataError);
}

TEST_CASE("parse_ais_csv: unparseable cells skip the row only") {
    std::istringstream in(
        "mmsi,timestamp,lat,lon,sog,cog,vessel_type\n"
        "1,abc,29.0,122.0,5.0,10.0,tanker\n"
        "1,200,29.0,122.0,notanumber,10.0,tanker\n"
        "1,300,29.0,122.0,5.0,10.0,tanker\n");
    ParseStats stats;
    const auto pts = parse_ais_csv(in, CsvSchema{}, &stats);
    CHECK(pts.size() == 1);
    CHECK(stats.rows_malformed == 2);
}

TEST_CASE("parse_ais_csv accepts ISO-8601 timestamps, detected per file") {
    std::istringstream in(
        "mmsi,timestamp,lat,lon,sog,cog,vessel_type\n"
        "9,2015-03-01T00:00:00,29.0,122.0,5.0,10.0,cargo\n"
        "9,2015-03-01T00:00:10,29.0,122.0,5.0,10.0,cargo\n");
    const auto pts = parse_ais_csv(in, CsvSchema{}, nullptr);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].timestamp - pts[0].timestamp == 10);
    CHECK(pts[0].timestamp == 1425168000); // 2015-03-01 UTC
}

TEST_CASE("group_by_vessel splits interleaved vessels and sorts by time") {
    std::vector<PositionPoint> pts = {pt("b", 30, 29, 122, 5, 10), pt("a", 20, 29, 122, 5, 10),
                                      pt("b", 10, 29, 122, 5, 10), pt("a", 0, 29, 122, 5, 10)};
    const auto seqs = group_by_vessel(pts);
    REQUIRE(seqs.size() == 2);
    CHECK(seqs[0].mmsi == "a");
    CHECK(seqs[0].points[0].timestamp == 0);
    CHECK(seqs[0].points[1].timestamp == 20);
    CHECK(seqs[1].mmsi == "b");
    CHECK(seqs[1].points[0].timestamp == 10);
}

TEST_CASE("group_by_vessel dedups exact duplicate timestamps keeping the first") {
    std::vector<PositionPoint> pts = {pt("a", 5, 29, 122, 5, 10), pt("a", 5, 30, 123, 6, 20)};
    const auto seqs = group_by_vessel(pts);
    REQUIRE(seqs.size() == 1);
    REQUIRE(seqs[0].points.size() == 1);
    CHECK(seqs[0].points[0].lat == doctest::Approx(29));
}

TEST_CASE("group_by_vessel: single point group") {
    const auto seqs = group_by_vessel({pt("z", 1, 0, 0, 0, 0)});
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].points.size() == 1);
}

TEST_CASE("smooth leaves a constant-velocity track unchanged") {
    const PositionSequence seq = make_seq("a", 9);
    const PositionSequence out = smooth(seq, 3, 1.0);
    REQUIRE(out.points.size() == seq.points.size());
    for (std::size_t i = 0; i < seq.points.size(); ++i) {
        CHECK(out.points[i].sog == seq.points[i].sog);
        CHECK(out.points[i].lat == seq.points[i].lat);
    }
}

TEST_CASE("smooth repairs a lone sog spike with the window median") {
    PositionSequence seq = make_seq("a", 9);
    seq.points[4].sog = 50.0; // 40 kn jump over 10 s
    const PositionSequence out = smooth(seq, 3, 1.0);
    CHECK(out.points[4].sog == doctest::Approx(10.0));
    for (std::size_t i = 0; i < seq.points.size(); ++i)
        if (i != 4) CHECK(out.points[i].sog == seq.points[i].sog);
}

TEST_CASE("smooth repairs two planted spikes and leaves 18 points bit-identical") {
    PositionSequence seq = make_seq("a", 20);
    seq.points[5].sog = 60.0;
    seq.points[5].lat = 31.5; // GPS spike in position as well
    seq.points[13].sog = 55.0;
    const PositionSequence out = smooth(seq, 5, 1.0);
    CHECK(out.points[5].sog == doctest::Approx(10.0));
    CHECK(out.points[13].sog == doctest::Approx(10.0));
    CHECK(out.points[5].lat != doctest::Approx(31.5));
    for (std::size_t i = 0; i < 20; ++i) {
        if (i == 5 || i == 13) continue;
        CHECK(out.points[i].sog == seq.points[i].sog);
        CHECK(out.points[i].lat == seq.points[i].lat);
        CHECK(out.points[i].lon == seq.points[i].lon);
        CHECK(out.points[i].timestamp == seq.points[i].timestamp);
    }
}

TEST_CASE("smooth rejects even or zero windows") {
    const PositionSequence seq = make_seq("a", 5);
    CHECK_THROWS_AS(smooth(seq, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(smooth(seq, 0, 1.0), std::invalid_argument);
}

TEST_CASE("slice keeps a dense track whole") {
    const PositionSequence seq = make_seq("a", 10, 60);
    const auto slices = slice(seq, 1800);
    REQUIRE(slices.size() == 1);
    CHECK(slices[0].points.size() == 10);
}

TEST_CASE("slice splits at a half-hour gap") {
    PositionSequence seq = make_seq("a", 6, 10);
    for (std::size_t i = 3; i < 6; ++i) seq.points[i].timestamp += 3600;
    const auto slices = slice(seq, 1800);
    REQUIRE(slices.size() == 2);
    CHECK(slices[0].points.size() == 3);
    CHECK(slices[1].points.size() == 3);
}

TEST_CASE("slice: every gap oversized gives singletons") {
    PositionSequence seq;
    seq.mmsi = "a";
    for (int i = 0; i < 4; ++i) seq.points.push_back(pt("a", i * 3600, 29, 122, 5, 10));
    CHECK(slice(seq, 1800).size() == 4);
}

TEST_CASE("filter_min_length keeps thresholds inclusive") {
    std::vector<PositionSequence> seqs = {make_seq("a", 2999), make_seq("b", 3000),
                                          make_seq("c", 3001)};
    CHECK(filter_min_length(seqs, 3000).size() == 2);
    CHECK(filter_min_length(seqs, 1).size() == 3);
    CHECK(filter_min_length({}, 5).empty());
}

TEST_CASE("smooth preserves and slice partitions the timestamp multiset") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> gap(1, 400);
    std::uniform_real_distribution<double> sogd(0.0, 30.0);
    for (int rep = 0; rep < 20; ++rep) {
        PositionSequence seq;
        seq.mmsi = "r";
        std::int64_t t = 0;
        for (int i = 0; i < 50; ++i) {
            t += gap(rng);
            seq.points.push_back(pt("r", t, 29.0, 122.0, sogd(rng), 45.0));
        }
        const PositionSequence sm = smooth(seq, 5, 1.0);
        REQUIRE(sm.points.size() == seq.points.size());
        for (std::size_t i = 0; i < seq.points.size(); ++i)
            CHECK(sm.points[i].timestamp == seq.points[i].timestamp);

        std::vector<std::int64_t> all;
        for (const PositionSequence& piece : slice(sm, 200))
            for (const PositionPoint& p : piece.points) all.push_back(p.timestamp);
        REQUIRE(all.size() == seq.points.size());
        for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == seq.points[i].timestamp);
    }
}

TEST_CASE("sequences JSONL round-trips and rewrites identically") {
    std::vector<PositionSequence> seqs = {make_seq("a", 5), make_seq("b", 3)};
    seqs[0].vessel_type = VesselType::tanker;
    std::ostringstream out;
    write_sequences_jsonl(out, seqs);
    std::istringstream in(out.str());
    const auto back = read_sequences_jsonl(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].mmsi == "a");
    CHECK(back[0].vessel_type == VesselType::tanker);
    REQUIRE(back[0].points.size() == 5);
    CHECK(back[0].points[4].lat == doctest::Approx(seqs[0].points[4].lat));

    std::ostringstream out2;
    write_sequences_jsonl(out2, back);
    CHECK(out.str() == out2.str());
}
