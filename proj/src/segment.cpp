#include "vbc/segment.hpp"

#include <cmath>
#include <stdexcept>

#include "vbc/geo.hpp"

namespace vbc {

void check_config(const SegmenterConfig& cfg) {
    if (cfg.stride_u < 2) throw std::invalid_argument("SegmenterConfig: stride u must be >= 2");
    if (cfg.lambda < 1) throw std::invalid_argument("SegmenterConfig: lambda must be >= 1");
    if (cfg.delta < 0.0) throw std::invalid_argument("SegmenterConfig: delta must be >= 0");
    if (cfg.speed_sign_fraction <= 0.5 || cfg.speed_sign_fraction > 1.0)
        throw std::invalid_argument("SegmenterConfig: speed_sign_fraction must be in (0.5, 1]");
    if (cfg.stop_speed <= 0.0 || cfg.speed_var_threshold <= 0.0 || cfg.turn_threshold <= 0.0)
        throw std::invalid_argument("SegmenterConfig: thresholds must be positive");
}

std::vector<std::size_t> pre_change_points(const PositionSequence& seq, int u) {
    std::vector<std::size_t> out;
    if (u < 2) throw std::invalid_argument("pre_change_points: u must be >= 2");
    const std::size_t n = seq.points.size();
    const std::size_t su = static_cast<std::size_t>(u);
    if (n < 2 * su) return out;
    const std::size_t last_multiple = n / su; // floor(n/u)
    for (std::size_t k = 1; k + 1 <= last_multiple; ++k) out.push_back(k * su);
    return out;
}

std::array<double, 4> window_features(const PositionPoint* pts, std::size_t count) {
    if (count < 2) throw std::invalid_argument("window_features: need at least 2 points");

    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += pts[i].sog;
    const double mean_sog = sum / static_cast<double>(count);

    double ss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = pts[i].sog - mean_sog;
        ss += d * d;
    }
    const double std_sog = std::sqrt(ss / static_cast<double>(count)); // population

    const double net_course = wrap_angle_deg(pts[count - 1].cog - pts[0].cog);

    double abs_step = 0.0;
    for (std::size_t i = 1; i < count; ++i)
        abs_step += std::abs(wrap_angle_deg(pts[i].cog - pts[i - 1].cog));
    const double mean_abs_step = abs_step / static_cast<double>(count - 1);

    return {mean_sog, std_sog, net_course, mean_abs_step};
}

std::array<double, 4> window_features(const std::vector<PositionPoint>& pts) {
    return window_features(pts.data(), pts.size());
}

namespace {

struct CandidateWindows {
    std::size_t index;
    std::array<double, 4> left;
    std::array<double, 4> right;
};

// Collects per-candidate window features and the z-normalization statistics
// over all collected windows. Candidates without both windows in range are
// skipped.
std::vector<CandidateWindows> collect_windows(const PositionSequence& seq, int lambda, int u,
                                              std::array<double, 4>* mean_out,
                                              std::array<double, 4>* std_out) {
    const std::size_t n = seq.points.size();
    const std::size_t w = static_cast<std::size_t>(lambda) * static_cast<std::size_t>(u);
    std::vector<CandidateWindows> wins;
    for (std::size_t c : pre_change_points(seq, u)) {
        if (c < w || c + w > n) continue;
        CandidateWindows cw;
        cw.index = c;
        cw.left = window_features(seq.points.data() + (c - w), w);
        cw.right = window_features(seq.points.data() + c, w);
        wins.push_back(cw);
    }

    // Per-feature scale floors (knots, knots, degrees, degrees): a feature
    // whose population spread falls below physical significance must not have
    // measurement noise amplified to unit scale. Exactly-constant features
    // fall back to the floor as well.
    static constexpr std::array<double, 4> kStdFloor{0.25, 0.25, 2.0, 0.5};

    std::array<double, 4> mean{0, 0, 0, 0};
    std::array<double, 4> sd{1, 1, 1, 1};
    if (!wins.empty()) {
        const double cnt = 2.0 * static_cast<double>(wins.size());
        for (const CandidateWindows& cw : wins)
            for (int f = 0; f < 4; ++f) mean[f] += cw.left[f] + cw.right[f];
        for (int f = 0; f < 4; ++f) mean[f] /= cnt;
        std::array<double, 4> ss{0, 0, 0, 0};
        for (const CandidateWindows& cw : wins)
            for (int f = 0; f < 4; ++f) {
                const double dl = cw.left[f] - mean[f];
                const double dr = cw.right[f] - mean[f];
                ss[f] += dl * dl + dr * dr;
            }
        for (int f = 0; f < 4; ++f) sd[f] = std::max(std::sqrt(ss[f] / cnt), kStdFloor[f]);
    }
    if (mean_out) *mean_out = mean;
    if (std_out) *std_out = sd;
    return wins;
}

} // namespace

std::vector<CandidateScore> score_candidates(const PositionSequence& seq,
                                             const SegmenterConfig& cfg) {
    std::array<double, 4> mean, sd;
    std::vector<CandidateWindows> wins = collect_windows(seq, cfg.lambda, cfg.stride_u, &mean, &sd);
    std::vector<CandidateScore> out;
    out.reserve(wins.size());
    for (const CandidateWindows& cw : wins) {
        double d2 = 0.0;
        for (int f = 0; f < 4; ++f) {
            const double zl = (cw.left[f] - mean[f]) / sd[f];
            const double zr = (cw.right[f] - mean[f]) / sd[f];
            d2 += (zl - zr) * (zl - zr);
        }
        out.push_back({cw.index, std::sqrt(d2)});
    }
    return out;
}

double change_point_score(const PositionSequence& seq, std::size_t candidate, int lambda, int u) {
    SegmenterConfig cfg;
    cfg.stride_u = u;
    cfg.lambda = lambda;
    for (const CandidateScore& cs : score_candidates(seq, cfg))
        if (cs.index == candidate) return cs.score;
    throw std::out_of_range("change_point_score: candidate has no fully contained windows");
}

std::vector<SubTrajectory> segment(const PositionSequence& seq, const SegmenterConfig& cfg) {
    check_config(cfg);
    std::vector<std::size_t> cuts;
    for (const CandidateScore& cs : score_candidates(seq, cfg))
        if (cs.score > cfg.delta) cuts.push_back(cs.index);

    std::vector<SubTrajectory> out;
    if (seq.points.empty()) return out;

    std::size_t start = 0;
    auto emit = [&](std::size_t end_exclusive) {
        SubTrajectory st;
        st.parent_mmsi = seq.mmsi;
        st.start_index = start;
        st.end_index = end_exclusive - 1;
        st.points.assign(seq.points.begin() + static_cast<std::ptrdiff_t>(start),
                         seq.points.begin() + static_cast<std::ptrdiff_t>(end_exclusive));
        out.push_back(std::move(st));
        start = end_exclusive;
    };
    for (std::size_t cut : cuts) emit(cut);
    emit(seq.points.size());
    return out;
}

SpeedStatus classify_speed(const SubTrajectory& seg, const SegmenterConfig& cfg) {
    const std::size_t n = seg.points.size();
    if (n < 2) throw std::invalid_argument("classify_speed: degenerate segment (< 2 points)");

    double sum = 0.0;
    for (const PositionPoint& p : seg.points) sum += p.sog;
    const double mean_sog = sum / static_cast<double>(n);
    if (mean_sog < cfg.stop_speed) return SpeedStatus::stopped;

    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = seg.points[i].sog - seg.points[i - 1].sog;
        if (d > 0.0) ++pos;
        else if (d < 0.0) ++neg;
    }
    const double total = static_cast<double>(n - 1);
    if (static_cast<double>(pos) / total >= cfg.speed_sign_fraction)
        return SpeedStatus::accelerating;
    if (static_cast<double>(neg) / total >= cfg.speed_sign_fraction)
        return SpeedStatus::decelerating;

    double ss = 0.0;
    for (const PositionPoint& p : seg.points) {
        const double d = p.sog - mean_sog;
        ss += d * d;
    }
    if (ss / static_cast<double>(n) < cfg.speed_var_threshold) return SpeedStatus::uniform;

    const double end_diff = seg.points.back().sog - seg.points.front().sog;
    if (end_diff > 0.0) return SpeedStatus::accelerating;
    if (end_diff < 0.0) return SpeedStatus::decelerating;
    return SpeedStatus::uniform;
}

TurnStatus classify_turn(const SubTrajectory& seg, const SegmenterConfig& cfg) {
    if (seg.points.size() < 2)
        throw std::invalid_argument("classify_turn: degenerate segment (< 2 points)");
    if (classify_speed(seg, cfg) == SpeedStatus::stopped)
        throw std::logic_error("classify_turn: called on a stopped segment");

    const double delta = wrap_angle_deg(seg.points.back().cog - seg.points.front().cog);
    if (delta > cfg.turn_threshold) return TurnStatus::right;
    if (delta < -cfg.turn_threshold) return TurnStatus::left;
    return TurnStatus::straight;
}

void label(std::vector<SubTrajectory>& segments, const SegmenterConfig& cfg) {
    for (SubTrajectory& seg : segments) {
        const SpeedStatus speed = classify_speed(seg, cfg);
        if (speed == SpeedStatus::stopped) {
            seg.behavior = BehaviorLabel{SpeedStatus::stopped, TurnStatus::none};
        } else {
            seg.behavior = BehaviorLabel{speed, classify_turn(seg, cfg)};
        }
    }
}

std::vector<SubTrajectory> segment_and_label(const PositionSequence& seq,
                                             const SegmenterConfig& cfg) {
    std::vector<SubTrajectory> segs = segment(seq, cfg);
    label(segs, cfg);
    return segs;
}

} // namespace vbc
