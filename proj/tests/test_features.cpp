#include <doctest.h>

#include "vbc/errors.hpp"
#include "vbc/features.hpp"
#include "vbc/synth.hpp"

using namespace vbc;

namespace {

FeaturizedSequence featurize_track(std::size_t n, double cog) {
    PositionSequence seq;
    seq.mmsi = "m";
    for (std::size_t i = 0; i < n; ++i) {
        PositionPoint p;
        p.mmsi = "m";
        p.timestamp = 1000 + static_cast<std::int64_t>(i) * 10;
        p.lat = 30;
        p.lon = 122;
        p.sog = 12.0;
        p.cog = cog;
        seq.points.push_back(p);
    }
    std::vector<SegmentSpan> spans = {{0, n - 1, {SpeedStatus::uniform, TurnStatus::straight}}};
    return featurize_subtraj(seq, spans);
}

LabelSequence two_point_labels(std::int64_t t0) {
    LabelSequence ls;
    ls.mmsi = "m";
    LabelPoint a;
    a.timestamp = t0;
    a.lat = 30.0;
    a.lon = 122.0;
    a.port_id = "A";
    a.port_label = VesselType::passenger;
    LabelPoint b = a;
    b.timestamp = t0 + 100;
    b.lat = 30.1;
    b.port_id = "B";
    b.port_label = VesselType::tanker;
    ls.label_points = {a, b};
    return ls;
}

} // namespace

TEST_CASE("featurize_subtraj yields one fixed-width step per point") {
    const FeaturizedSequence f = featurize_track(100, 87.0);
    REQUIRE(f.steps.size() == 100);
    REQUIRE(f.labels.size() == 100);
    for (const FeatureStep& s : f.steps) CHECK(s.features.size() == 13);
    CHECK(f.steps[0].relative_time == 0.0);
    CHECK(f.steps[1].relative_time == 10.0);
    CHECK(f.labels[0] == behavior_code({SpeedStatus::uniform, TurnStatus::straight}));
}

TEST_CASE("cog 0 and 360 featurize identically") {
    const FeaturizedSequence a = featurize_track(3, 0.0);
    const FeaturizedSequence b = featurize_track(3, 360.0);
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].features(1) == b.steps[i].features(1));
        CHECK(a.steps[i].features(2) == b.steps[i].features(2));
    }
}

TEST_CASE("featurize_subtraj requires covering segments") {
    PositionSequence seq;
    seq.mmsi = "m";
    for (int i = 0; i < 10; ++i) {
        PositionPoint p;
        p.mmsi = "m";
        p.timestamp = i;
        seq.points.push_back(p);
    }
    std::vector<SegmentSpan> gap = {{0, 3, {SpeedStatus::uniform, TurnStatus::straight}},
                                    {6, 9, {SpeedStatus::stopped, TurnStatus::none}}};
    CHECK_THROWS_AS(featurize_subtraj(seq, gap), DataError);
}

TEST_CASE("featurize_label_seq holds the last label point on a virtual grid") {
    const LabelSequence ls = two_point_labels(0);
    FeatureSchema schema;
    schema.level = "label";
    schema.label_names = {"passenger", "tanker"};
    const FeaturizedSequence f = featurize_label_seq(ls, schema, 10.0);
    REQUIRE(f.steps.size() == 11);
    for (int i = 0; i < 10; ++i) {
        CHECK(f.labels[i] == 0); // passenger
        CHECK(f.steps[i].features(0) == doctest::Approx(30.0));
    }
    CHECK(f.labels[10] == 1); // tanker at t=100
    CHECK(f.steps[10].features(0) == doctest::Approx(30.1));
}

TEST_CASE("featurize_label_seq with one label point yields one step") {
    LabelSequence ls = two_point_labels(500);
    ls.label_points.resize(1);
    FeatureSchema schema;
    schema.level = "label";
    schema.label_names = {"passenger", "tanker"};
    const FeaturizedSequence f = featurize_label_seq(ls, schema, 10.0);
    REQUIRE(f.steps.size() == 1);
    CHECK(f.steps[0].relative_time == 0.0);
}

TEST_CASE("identical label patterns at different absolute times featurize identically") {
    FeatureSchema schema;
    schema.level = "label";
    schema.label_names = {"passenger", "tanker"};
    const FeaturizedSequence a = featurize_label_seq(two_point_labels(0), schema, 0.0);
    const FeaturizedSequence b = featurize_label_seq(two_point_labels(86400 * 30), schema, 0.0);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].relative_time == b.steps[i].relative_time);
        CHECK(a.steps[i].features == b.steps[i].features);
    }
}

TEST_CASE("featurize_label_seq rejects empty sequences") {
    LabelSequence ls;
    ls.mmsi = "m";
    FeatureSchema schema;
    schema.level = "label";
    schema.label_names = {"x"};
    CHECK_THROWS_AS(featurize_label_seq(ls, schema, 0.0), DataError);
}

TEST_CASE("normalizer applies unit-variance fallback for constant features") {
    const FeaturizedSequence f = featurize_track(20, 90.0);
    const Normalizer n = Normalizer::fit({f});
    // sog is constant 12: mean 12, fallback std 1.
    CHECK(n.mean(0) == doctest::Approx(12.0));
    CHECK(n.std(0) == doctest::Approx(1.0));
    const Eigen::VectorXd z = n.apply(f.steps[0].features);
    CHECK(z(0) == doctest::Approx(0.0));

    Eigen::VectorXd wrong(3);
    wrong.setZero();
    CHECK_THROWS_AS(n.apply(wrong), DataError);
}
