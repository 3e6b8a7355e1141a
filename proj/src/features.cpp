#include "vbc/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "vbc/errors.hpp"
#include "vbc/geo.hpp"

namespace vbc {

FeatureSchema subtraj_schema() {
    FeatureSchema s;
    s.level = "subtraj";
    for (const BehaviorLabel& b : all_behaviors()) s.label_names.push_back(behavior_name(b));
    return s;
}

FeatureSchema label_schema(const std::vector<LabelSequence>& seqs) {
    std::set<std::string> cats;
    for (const LabelSequence& ls : seqs)
        for (const LabelPoint& p : ls.label_points) cats.insert(to_string(p.port_label));
    FeatureSchema s;
    s.level = "label";
    s.label_names.assign(cats.begin(), cats.end());
    if (s.label_names.empty()) throw DataError("label_schema: no label points in input");
    return s;
}

FeaturizedSequence featurize_subtraj(const PositionSequence& seq,
                                     const std::vector<SegmentSpan>& segments) {
    if (seq.points.empty()) throw DataError("featurize_subtraj: empty sequence");
    if (segments.empty()) throw DataError("featurize_subtraj: no segments");

    FeaturizedSequence out;
    out.mmsi = seq.mmsi;
    out.vessel_type = seq.vessel_type;
    out.steps.reserve(seq.points.size());
    out.labels.reserve(seq.points.size());

    const std::int64_t t0 = seq.points.front().timestamp;
    std::size_t si = 0;
    for (std::size_t i = 0; i < seq.points.size(); ++i) {
        while (si + 1 < segments.size() && i > segments[si].end) ++si;
        if (i < segments[si].start || i > segments[si].end)
            throw DataError("featurize_subtraj: segments do not cover the sequence");

        const PositionPoint& p = seq.points[i];
        FeatureStep step;
        step.relative_time = static_cast<double>(p.timestamp - t0);
        Eigen::VectorXd f(3 + kBehaviorCount);
        const double cog_rad = deg2rad(wrap_course_deg(p.cog));
        f(0) = p.sog;
        f(1) = std::sin(cog_rad);
        f(2) = std::cos(cog_rad);
        f.segment(3, kBehaviorCount).setZero();
        const int code = behavior_code(segments[si].behavior);
        f(3 + code) = 1.0;
        step.features = std::move(f);
        out.steps.push_back(std::move(step));
        out.labels.push_back(code);
    }
    return out;
}

FeaturizedSequence featurize_subtraj(const PositionSequence& seq,
                                     const std::vector<SubTrajectory>& segments) {
    std::vector<SegmentSpan> spans;
    spans.reserve(segments.size());
    for (const SubTrajectory& s : segments)
        spans.push_back({s.start_index, s.end_index, s.behavior});
    return featurize_subtraj(seq, spans);
}

FeaturizedSequence featurize_label_seq(const LabelSequence& seq, const FeatureSchema& schema,
                                       double grid_step_s) {
    if (seq.label_points.empty()) throw DataError("featurize_label_seq: empty label sequence");
    if (schema.level != "label")
        throw std::invalid_argument("featurize_label_seq: schema level must be 'label'");

    auto category_index = [&](const LabelPoint& p) {
        const std::string name = to_string(p.port_label);
        auto it = std::find(schema.label_names.begin(), schema.label_names.end(), name);
        if (it == schema.label_names.end())
            throw DataError("featurize_label_seq: category '" + name + "' not in schema");
        return static_cast<int>(it - schema.label_names.begin());
    };

    FeaturizedSequence out;
    out.mmsi = seq.mmsi;
    out.vessel_type = seq.vessel_type;

    const std::int64_t t0 = seq.label_points.front().timestamp;
    const std::int64_t t_last = seq.label_points.back().timestamp;

    std::vector<double> grid;
    if (grid_step_s <= 0.0) {
        for (const LabelPoint& p : seq.label_points)
            grid.push_back(static_cast<double>(p.timestamp - t0));
    } else {
        for (double tau = 0.0; tau <= static_cast<double>(t_last - t0) + 1e-9; tau += grid_step_s)
            grid.push_back(tau);
        if (grid.back() < static_cast<double>(t_last - t0))
            grid.push_back(static_cast<double>(t_last - t0));
    }

    const int n_cat = static_cast<int>(schema.label_names.size());
    std::size_t cursor = 0;
    for (double tau : grid) {
        // Hold-last: most recent label point at or before this grid time.
        while (cursor + 1 < seq.label_points.size() &&
               static_cast<double>(seq.label_points[cursor + 1].timestamp - t0) <= tau)
            ++cursor;
        const LabelPoint& p = seq.label_points[cursor];

        FeatureStep step;
        step.relative_time = tau;
        Eigen::VectorXd f(2 + n_cat);
        f(0) = p.lat;
        f(1) = p.lon;
        f.segment(2, n_cat).setZero();
        const int cat = category_index(p);
        f(2 + cat) = 1.0;
        step.features = std::move(f);
        out.steps.push_back(std::move(step));
        out.labels.push_back(cat);
    }
    return out;
}

Normalizer Normalizer::fit(const std::vector<FeaturizedSequence>& data) {
    std::size_t count = 0;
    int dim = 0;
    for (const FeaturizedSequence& s : data)
        for (const FeatureStep& st : s.steps) {
            if (dim == 0) dim = static_cast<int>(st.features.size());
            ++count;
        }
    if (count == 0) throw DataError("Normalizer::fit: no steps");

    Normalizer n;
    n.mean = Eigen::VectorXd::Zero(dim);
    n.std = Eigen::VectorXd::Zero(dim);
    for (const FeaturizedSequence& s : data)
        for (const FeatureStep& st : s.steps) n.mean += st.features;
    n.mean /= static_cast<double>(count);
    for (const FeaturizedSequence& s : data)
        for (const FeatureStep& st : s.steps) {
            Eigen::VectorXd d = st.features - n.mean;
            n.std += d.cwiseProduct(d);
        }
    n.std = (n.std / static_cast<double>(count)).cwiseSqrt();
    for (int i = 0; i < dim; ++i)
        if (n.std(i) < 1e-12) n.std(i) = 1.0;
    return n;
}

Eigen::VectorXd Normalizer::apply(const Eigen::VectorXd& x) const {
    if (!fitted()) throw std::logic_error("Normalizer::apply before fit");
    if (x.size() != mean.size()) throw DataError("Normalizer::apply: width mismatch");
    return (x - mean).cwiseQuotient(std);
}

} // namespace vbc
