#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vbc/core.hpp"

namespace vbc {

// One encoder input step. `relative_time` (seconds since sequence start) is
// carried for traces and plots; the encoder consumes only `features`.
struct FeatureStep {
    double relative_time = 0.0;
    Eigen::VectorXd features;
};

struct FeaturizedSequence {
    std::string mmsi;
    VesselType vessel_type = VesselType::other;
    std::vector<FeatureStep> steps;
    std::vector<int> labels; // per-step target index into the schema's label names
};

// What the per-step features and prediction targets mean; stored in the
// checkpoint so inference featurizes exactly like training.
struct FeatureSchema {
    std::string level;                    // "subtraj" or "label"
    std::vector<std::string> label_names; // predictor output vocabulary

    int dim() const {
        if (level == "subtraj") return 3 + static_cast<int>(label_names.size());
        return 2 + static_cast<int>(label_names.size());
    }
};

FeatureSchema subtraj_schema();
// Label-level schema over the port categories present in the data.
FeatureSchema label_schema(const std::vector<LabelSequence>& seqs);

struct SegmentSpan {
    std::size_t start = 0; // inclusive
    std::size_t end = 0;   // inclusive
    BehaviorLabel behavior;
};

// One step per position point: [sog, sin cog, cos cog, behavior one-hot].
// Segments must cover the sequence.
FeaturizedSequence featurize_subtraj(const PositionSequence& seq,
                                     const std::vector<SegmentSpan>& segments);
FeaturizedSequence featurize_subtraj(const PositionSequence& seq,
                                     const std::vector<SubTrajectory>& segments);

// Steps on a uniform virtual time grid (grid_step_s seconds; 0 = one step
// per label point), each carrying the most recent label point's features:
// [lat, lon, category one-hot].
FeaturizedSequence featurize_label_seq(const LabelSequence& seq, const FeatureSchema& schema,
                                       double grid_step_s = 0.0);

// Per-feature z-normalization statistics, fit on the training set.
struct Normalizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;

    bool fitted() const { return mean.size() > 0; }
    // Constant features fall back to unit variance.
    static Normalizer fit(const std::vector<FeaturizedSequence>& data);
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

} // namespace vbc
