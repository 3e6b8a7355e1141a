#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "vbc/core.hpp"

namespace vbc {

struct SegmenterConfig {
    int stride_u = 20;               // points per pre-segment, >= 2
    int lambda = 2;                  // window radius in pre-segments, >= 1
    double delta = 1.0;              // change-point score threshold (on z-normalized features)
    double speed_sign_fraction = 0.8; // share of same-sign adjacent speed diffs, in (0.5, 1]
    double stop_speed = 10.0;        // knots; mean sog below this is a stop
    double speed_var_threshold = 1.0; // knots^2, population variance
    double turn_threshold = 15.0;    // degrees; |net course change| above this is a turn
};

void check_config(const SegmenterConfig& cfg);

// Candidate cut indices {u, 2u, ..., u*(floor(n/u)-1)}; empty when n < 2u.
std::vector<std::size_t> pre_change_points(const PositionSequence& seq, int u);

// (mean sog, population std sog, net course change wrapped to (-180,180],
//  mean |per-step course change|). Requires >= 2 points.
std::array<double, 4> window_features(const PositionPoint* pts, std::size_t count);
std::array<double, 4> window_features(const std::vector<PositionPoint>& pts);

struct CandidateScore {
    std::size_t index = 0;
    double score = 0.0;
};

// Scores every candidate whose two lambda*u windows fit inside the sequence.
// Scores are Euclidean distances between the windows' feature vectors after
// z-normalization over all candidate windows of this trajectory.
std::vector<CandidateScore> score_candidates(const PositionSequence& seq,
                                             const SegmenterConfig& cfg);

// Score of one candidate; requires both windows in range.
double change_point_score(const PositionSequence& seq, std::size_t candidate, int lambda, int u);

// Cuts at every candidate with score > delta. Slices are exclusive and
// exhaustive; with no retained cut the whole sequence is one segment.
// Returned segments carry no behavior label yet.
std::vector<SubTrajectory> segment(const PositionSequence& seq, const SegmenterConfig& cfg);

SpeedStatus classify_speed(const SubTrajectory& seg, const SegmenterConfig& cfg);

// Requires a non-stopped segment (throws std::logic_error otherwise).
TurnStatus classify_turn(const SubTrajectory& seg, const SegmenterConfig& cfg);

// Assigns one of the 10 behavior labels to every segment, in place.
void label(std::vector<SubTrajectory>& segments, const SegmenterConfig& cfg);

// segment + label in one pass.
std::vector<SubTrajectory> segment_and_label(const PositionSequence& seq,
                                             const SegmenterConfig& cfg);

} // namespace vbc
