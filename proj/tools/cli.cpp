#include "cli.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "vbc/errors.hpp"
#include "vbc/features.hpp"
#include "vbc/ingest.hpp"
#include "vbc/jsonl.hpp"
#include "vbc/label_seq.hpp"
#include "vbc/metrics.hpp"
#include "vbc/model.hpp"
#include "vbc/segment.hpp"
#include "vbc/svg.hpp"
#include "vbc/synth.hpp"

#include <nlohmann/json.hpp>

namespace vbc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open input file: " + path);
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot open output file: " + path);
    return f;
}

std::vector<Port> default_ports() {
    return {{"A", 30.000, 122.000, std::nullopt},
            {"B", 30.065, 122.010, std::nullopt},
            {"C", 30.040, 122.060, std::nullopt},
            {"D", 29.985, 122.045, std::nullopt}};
}

// ---- synth ----------------------------------------------------------------

struct SynthOpts {
    std::string out;
    std::string ports_out;
    int ferry = 10, liner = 10, tramp = 10;
    std::size_t points = 300;
    std::uint64_t seed = 1;
    bool switch_vessel = false;
};

void cmd_synth(const SynthOpts& o, std::ostream& out, std::ostream&) {
    FleetConfig cfg;
    cfg.ports = default_ports();
    cfg.n_ferry = o.ferry;
    cfg.n_liner = o.liner;
    cfg.n_tramp = o.tramp;
    cfg.seed = o.seed;
    cfg.target_points = o.points;

    std::vector<FleetVessel> fleet = gen_fleet(cfg);
    if (o.switch_vessel) fleet.push_back(gen_switch_vessel(cfg));

    std::vector<PositionSequence> seqs;
    seqs.reserve(fleet.size());
    for (FleetVessel& v : fleet) seqs.push_back(std::move(v.seq));

    std::ofstream f = open_out(o.out);
    write_ais_csv(f, seqs);
    out << "synth: wrote " << seqs.size() << " vessels to " << o.out << "\n";

    if (!o.ports_out.empty()) {
        std::ofstream pf = open_out(o.ports_out);
        pf << "port_id,lat,lon\n";
        for (const Port& p : cfg.ports) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", p.id.c_str(), p.lat, p.lon);
            pf << buf;
        }
        out << "synth: wrote " << cfg.ports.size() << " ports to " << o.ports_out << "\n";
    }
}

// ---- ingest ---------------------------------------------------------------

struct IngestOpts {
    std::string input;
    std::string out;
    std::int64_t max_gap = 1800;
    std::size_t min_points = 3;
    int smooth_window = 5;
    double speed_jump_limit = 2.0;
};

void cmd_ingest(const IngestOpts& o, std::ostream& out, std::ostream& err) {
    std::ifstream f = open_in(o.input);
    ParseStats stats;
    const std::vector<PositionPoint> points = parse_ais_csv(f, CsvSchema{}, &stats);

    std::vector<PositionSequence> grouped = group_by_vessel(points);
    std::vector<PositionSequence> sliced;
    for (const PositionSequence& seq : grouped) {
        const PositionSequence sm = smooth(seq, o.smooth_window, o.speed_jump_limit);
        for (PositionSequence& piece : slice(sm, o.max_gap)) sliced.push_back(std::move(piece));
    }
    const std::vector<PositionSequence> kept = filter_min_length(sliced, o.min_points);

    std::ofstream of = open_out(o.out);
    write_sequences_jsonl(of, kept);

    out << "ingest: rows read " << stats.rows_read << ", malformed " << stats.rows_malformed
        << ", out-of-bounds " << stats.rows_out_of_bounds << ", kept " << stats.rows_kept << "\n";
    out << "ingest: vessels " << grouped.size() << ", slices " << sliced.size()
        << ", sequences emitted " << kept.size() << "\n";
    if (kept.empty()) err << "warning: no sequences passed the filters\n";
}

// ---- segment ----------------------------------------------------------------

struct SegmentOpts {
    std::string input;
    std::string out;
    SegmenterConfig cfg;
};

void cmd_segment(const SegmentOpts& o, std::ostream& out, std::ostream&) {
    check_config(o.cfg);
    std::ifstream f = open_in(o.input);
    const std::vector<PositionSequence> seqs = read_sequences_jsonl(f);

    std::vector<SegmentRecord> records;
    for (std::size_t i = 0; i < seqs.size(); ++i)
        for (const SubTrajectory& seg : segment_and_label(seqs[i], o.cfg))
            records.push_back(to_record(seg, i));

    std::ofstream of = open_out(o.out);
    write_segments_jsonl(of, records);
    out << "segment: " << seqs.size() << " sequences -> " << records.size() << " segments\n";
}

// ---- label ------------------------------------------------------------------

BehaviorPredicate parse_behavior_predicate(const std::string& name) {
    if (name == "any") return [](const BehaviorLabel&) { return true; };
    if (name == "stopped") return stopped_predicate();
    const std::optional<BehaviorLabel> b = behavior_from_name(name);
    if (!b) throw DataError("unknown behavior '" + name + "'");
    return behavior_equals(*b);
}

// Joins a sequences file with its segments file into per-sequence labeled
// sub-trajectories.
std::vector<std::pair<PositionSequence, std::vector<SubTrajectory>>> join_segments(
    const std::vector<PositionSequence>& seqs, const std::vector<SegmentRecord>& records) {
    std::map<std::size_t, std::vector<const SegmentRecord*>> by_seq;
    for (const SegmentRecord& r : records) by_seq[r.seq].push_back(&r);

    std::vector<std::pair<PositionSequence, std::vector<SubTrajectory>>> out;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        auto it = by_seq.find(i);
        if (it == by_seq.end()) continue;
        std::vector<SubTrajectory> segs;
        for (const SegmentRecord* r : it->second) {
            if (r->end >= seqs[i].points.size() || r->start > r->end)
                throw DataError("segment record out of range for sequence " + std::to_string(i));
            const std::optional<BehaviorLabel> b = behavior_from_name(r->behavior);
            if (!b) throw DataError("segment record with unknown behavior '" + r->behavior + "'");
            SubTrajectory st;
            st.parent_mmsi = r->mmsi;
            st.start_index = r->start;
            st.end_index = r->end;
            st.behavior = *b;
            st.points.assign(seqs[i].points.begin() + static_cast<std::ptrdiff_t>(r->start),
                             seqs[i].points.begin() + static_cast<std::ptrdiff_t>(r->end) + 1);
            segs.push_back(std::move(st));
        }
        out.emplace_back(seqs[i], std::move(segs));
    }
    return out;
}

struct LabelOpts {
    std::string input;
    std::string segments;
    std::string ports;
    std::string out;
    double sigma = 2000.0;
    std::string behavior = "stopped";
};

void cmd_label(const LabelOpts& o, std::ostream& out, std::ostream& err) {
    std::ifstream sf = open_in(o.input);
    const std::vector<PositionSequence> seqs = read_sequences_jsonl(sf);
    std::ifstream gf = open_in(o.segments);
    const std::vector<SegmentRecord> records = read_segments_jsonl(gf);
    std::ifstream pf = open_in(o.ports);
    std::vector<Port> ports = read_ports_csv(pf);

    std::ofstream of = open_out(o.out);
    if (o.sigma <= 0.0) {
        err << "warning: sigma <= 0 matches nothing; empty output\n";
        out << "label: 0 label sequences\n";
        return;
    }

    PortRegistry registry{std::move(ports), o.sigma};
    const auto joined = join_segments(seqs, records);
    const std::vector<LabelSequence> labels =
        build_label_sequences(joined, registry, parse_behavior_predicate(o.behavior));

    write_label_sequences_jsonl(of, labels);
    std::size_t n_points = 0;
    for (const LabelSequence& ls : labels) n_points += ls.label_points.size();
    out << "label: " << labels.size() << " label sequences, " << n_points << " label points\n";
    if (labels.empty()) err << "warning: no segments matched any port\n";
}

// ---- shared featurization ---------------------------------------------------

struct DatasetOpts {
    std::string level = "subtraj";
    std::string input;
    std::string segments;
    double grid_step = 0.0;
};

struct LoadedDataset {
    std::vector<FeaturizedSequence> data;
    FeatureSchema schema;
};

LoadedDataset load_dataset(const DatasetOpts& o, const FeatureSchema* fixed_schema) {
    LoadedDataset out;
    if (o.level == "subtraj") {
        out.schema = fixed_schema ? *fixed_schema : subtraj_schema();
        std::ifstream sf = open_in(o.input);
        const std::vector<PositionSequence> seqs = read_sequences_jsonl(sf);
        if (o.segments.empty()) throw DataError("--segments is required at level subtraj");
        std::ifstream gf = open_in(o.segments);
        const std::vector<SegmentRecord> records = read_segments_jsonl(gf);
        for (const auto& [seq, segs] : join_segments(seqs, records)) {
            std::vector<SegmentSpan> spans;
            spans.reserve(segs.size());
            for (const SubTrajectory& s : segs)
                spans.push_back({s.start_index, s.end_index, s.behavior});
            out.data.push_back(featurize_subtraj(seq, spans));
        }
    } else if (o.level == "label") {
        std::ifstream lf = open_in(o.input);
        const std::vector<LabelSequence> seqs = read_label_sequences_jsonl(lf);
        out.schema = fixed_schema ? *fixed_schema : label_schema(seqs);
        for (const LabelSequence& ls : seqs)
            out.data.push_back(featurize_label_seq(ls, out.schema, o.grid_step));
    } else {
        throw DataError("unknown level '" + o.level + "' (expected subtraj or label)");
    }
    if (out.data.empty()) throw DataError("no usable sequences in " + o.input);
    return out;
}

// ---- train ------------------------------------------------------------------

struct TrainOpts {
    DatasetOpts data;
    int k = 0;
    TrainConfig cfg;
    int hidden = 150;
    double dropout_keep = 1.0;
    std::string checkpoint;
    std::string history;
};

void cmd_train(const TrainOpts& o, std::ostream& out, std::ostream&) {
    const LoadedDataset ds = load_dataset(o.data, nullptr);

    EncoderConfig enc;
    enc.hidden_dim = o.hidden;
    enc.dropout_keep = o.dropout_keep;
    enc.seed = o.cfg.seed;

    const TrainedModel trained = train_with_restarts(ds.data, ds.schema, enc, o.k, o.cfg);
    const TrainResult& result = trained.result;

    std::ofstream cf = open_out(o.checkpoint);
    save_checkpoint(cf, trained.model);

    if (!result.history.empty()) {
        const LossBreakdown& a = result.history.front();
        const LossBreakdown& b = result.history.back();
        out << "train: " << ds.data.size() << " sequences, k=" << o.k << ", epochs "
            << result.history.size() << ", restart " << trained.restart << " of " << o.cfg.restarts
            << "\n";
        out << "train: total loss " << a.total << " -> " << b.total << " (l1 " << b.l1 << ", l2 "
            << b.l2 << ", kl " << b.kl << ")\n";
    }
    out << "train: checkpoint written to " << o.checkpoint << "\n";

    if (!o.history.empty()) {
        std::ofstream hf = open_out(o.history);
        hf << "epoch,l1,l2,kl,total\n";
        for (std::size_t e = 0; e < result.history.size(); ++e) {
            const LossBreakdown& l = result.history[e];
            hf << e << "," << l.l1 << "," << l.l2 << "," << l.kl << "," << l.total << "\n";
        }
    }
}

// ---- evaluate -----------------------------------------------------------------

struct EvaluateOpts {
    DatasetOpts data;
    std::string checkpoint;
    std::string truth = "vessel_type";
    std::string truth_file;
    std::string out_csv;
    std::string per_step_csv;
    std::string sweep;
    TrainConfig cfg; // used by --sweep-k
    int hidden = 150;
    double dropout_keep = 1.0;
};

std::vector<std::string> truth_names(const std::vector<FeaturizedSequence>& data,
                                     const std::string& column, const std::string& truth_file) {
    std::vector<std::string> names;
    names.reserve(data.size());
    if (!truth_file.empty()) {
        std::ifstream tf = open_in(truth_file);
        std::map<std::string, std::string> by_mmsi;
        std::string line;
        bool first = true;
        while (std::getline(tf, line)) {
            if (line.empty()) continue;
            const std::vector<std::string> f = split_csv_line(line);
            if (f.size() < 2) throw DataError("truth file: expected mmsi,class rows");
            if (first && f[0] == "mmsi") {
                first = false;
                continue;
            }
            first = false;
            by_mmsi[f[0]] = f[1];
        }
        for (const FeaturizedSequence& s : data) {
            auto it = by_mmsi.find(s.mmsi);
            if (it == by_mmsi.end())
                throw DataError("truth file does not cover mmsi " + s.mmsi +
                                " (truth length mismatch)");
            names.push_back(it->second);
        }
        return names;
    }
    for (const FeaturizedSequence& s : data) {
        if (column == "vessel_type") names.push_back(to_string(s.vessel_type));
        else if (column == "mmsi") names.push_back(s.mmsi);
        else throw DataError("unknown truth column '" + column + "'");
    }
    return names;
}

std::vector<int> to_ids(const std::vector<std::string>& names) {
    std::map<std::string, int> ids;
    std::vector<int> out;
    out.reserve(names.size());
    for (const std::string& n : names) {
        auto [it, fresh] = ids.emplace(n, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

std::vector<int> parse_sweep_range(const std::string& s) {
    const std::size_t pos = s.find("..");
    if (pos == std::string::npos) throw DataError("bad --sweep-k range '" + s + "', want a..b");
    int a = 0, b = 0;
    try {
        a = std::stoi(s.substr(0, pos));
        b = std::stoi(s.substr(pos + 2));
    } catch (const std::exception&) {
        throw DataError("bad --sweep-k range '" + s + "'");
    }
    if (a < 1 || b < a) throw DataError("bad --sweep-k range '" + s + "'");
    std::vector<int> ks;
    for (int k = a; k <= b; ++k) ks.push_back(k);
    return ks;
}

void cmd_evaluate(const EvaluateOpts& o, std::ostream& out, std::ostream& err) {
    if (!o.sweep.empty()) {
        const std::vector<int> ks = parse_sweep_range(o.sweep);
        const LoadedDataset ds = load_dataset(o.data, nullptr);
        const std::vector<int> truth = to_ids(truth_names(ds.data, o.truth, o.truth_file));

        EncoderConfig enc;
        enc.hidden_dim = o.hidden;
        enc.dropout_keep = o.dropout_keep;
        enc.seed = o.cfg.seed;

        const std::vector<SweepRow> rows = sweep_k(ds.data, ds.schema, enc, ks, o.cfg, truth);
        std::ofstream of = open_out(o.out_csv);
        write_sweep_csv(of, rows);
        for (const SweepRow& r : rows) {
            if (r.ok)
                out << "k=" << r.k << " purity=" << r.purity << " nmi=" << r.nmi
                    << " ari=" << r.ari << "\n";
            else
                err << "k=" << r.k << " failed: " << r.error << "\n";
        }
        return;
    }

    std::ifstream cf = open_in(o.checkpoint);
    const ClusterModel model = load_checkpoint(cf);
    DatasetOpts dopt = o.data;
    dopt.level = model.schema.level;
    const LoadedDataset ds = load_dataset(dopt, &model.schema);
    const std::vector<int> truth = to_ids(truth_names(ds.data, o.truth, o.truth_file));

    const std::vector<int> clusters = majority_clusters(model, ds.data);
    SweepRow row;
    row.k = model.k;
    row.purity = purity(clusters, truth);
    row.nmi = nmi(clusters, truth);
    row.ari = ari(clusters, truth);
    row.ok = true;

    std::ofstream of = open_out(o.out_csv);
    write_sweep_csv(of, {row});
    out << "evaluate: trajectory-level purity=" << row.purity << " nmi=" << row.nmi
        << " ari=" << row.ari << " (k=" << row.k << ", n=" << ds.data.size() << ")\n";

    if (!o.per_step_csv.empty()) {
        std::vector<int> step_clusters, step_truth;
        for (std::size_t i = 0; i < ds.data.size(); ++i) {
            const EvolutionTrace tr = trace(model, ds.data[i]);
            for (const TraceStep& st : tr.steps) {
                step_clusters.push_back(st.cluster);
                step_truth.push_back(truth[i]);
            }
        }
        SweepRow srow;
        srow.k = model.k;
        srow.purity = purity(step_clusters, step_truth);
        srow.nmi = nmi(step_clusters, step_truth);
        srow.ari = ari(step_clusters, step_truth);
        srow.ok = true;
        std::ofstream pf = open_out(o.per_step_csv);
        write_sweep_csv(pf, {srow});
        out << "evaluate: per-step purity=" << srow.purity << " nmi=" << srow.nmi
            << " ari=" << srow.ari << "\n";
    }
}

// ---- trace --------------------------------------------------------------------

struct TraceOpts {
    DatasetOpts data;
    std::string checkpoint;
    std::string mmsi;
    std::string out;
    std::string plot;
};

void cmd_trace(const TraceOpts& o, std::ostream& out, std::ostream&) {
    std::ifstream cf = open_in(o.checkpoint);
    const ClusterModel model = load_checkpoint(cf);
    DatasetOpts dopt = o.data;
    dopt.level = model.schema.level;
    const LoadedDataset ds = load_dataset(dopt, &model.schema);

    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < ds.data.size(); ++i)
        if (ds.data[i].mmsi == o.mmsi) hits.push_back(i);
    if (hits.empty()) throw DataError("mmsi '" + o.mmsi + "' not found in " + o.data.input);

    std::ofstream of = open_out(o.out);
    std::optional<EvolutionTrace> first;
    for (std::size_t idx : hits) {
        const EvolutionTrace tr = trace(model, ds.data[idx]);
        if (!first) first = tr;
        for (const TraceStep& st : tr.steps) {
            ordered_json rec;
            rec["mmsi"] = tr.mmsi;
            rec["seq"] = idx;
            rec["t"] = st.relative_time;
            rec["cluster"] = st.cluster;
            rec["probs"] = std::vector<double>(st.assign_probs.data(),
                                               st.assign_probs.data() + st.assign_probs.size());
            rec["yhat"] = std::vector<double>(st.predicted.data(),
                                              st.predicted.data() + st.predicted.size());
            rec["ybar"] =
                std::vector<double>(st.centroid_predicted.data(),
                                    st.centroid_predicted.data() + st.centroid_predicted.size());
            of << rec.dump() << "\n";
        }
    }
    out << "trace: wrote " << hits.size() << " sequence trace(s) for mmsi " << o.mmsi << "\n";

    if (!o.plot.empty()) {
        std::ofstream pf = open_out(o.plot);
        write_trace_svg(pf, *first, model.k, "cluster timeline, mmsi " + o.mmsi);
        out << "trace: plot written to " << o.plot << "\n";
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"vessel behavior clustering pipeline"};
    app.set_config("--config")->expected(0, 1);
    app.require_subcommand(0, 1);

    SynthOpts synth_o;
    CLI::App* synth_c = app.add_subcommand("synth", "generate a synthetic AIS fleet CSV");
    synth_c->add_option("--out", synth_o.out, "output AIS CSV")->required();
    synth_c->add_option("--ports-out", synth_o.ports_out, "write the port registry CSV");
    synth_c->add_option("--ferry", synth_o.ferry, "ferry count");
    synth_c->add_option("--liner", synth_o.liner, "liner count");
    synth_c->add_option("--tramp", synth_o.tramp, "tramp count");
    synth_c->add_option("--points", synth_o.points, "target points per vessel");
    synth_c->add_option("--seed", synth_o.seed, "generator seed");
    synth_c->add_flag("--switch-vessel", synth_o.switch_vessel,
                      "append one vessel that changes archetype mid-voyage");

    IngestOpts ingest_o;
    CLI::App* ingest_c = app.add_subcommand("ingest", "parse and clean an AIS CSV into JSONL");
    ingest_c->add_option("--input", ingest_o.input, "AIS CSV")->required();
    ingest_c->add_option("--out", ingest_o.out, "sequences JSONL")->required();
    ingest_c->add_option("--max-gap", ingest_o.max_gap, "slice at gaps above this many seconds");
    ingest_c->add_option("--min-points", ingest_o.min_points, "drop shorter sequences");
    ingest_c->add_option("--smooth-window", ingest_o.smooth_window, "median window (odd)");
    ingest_c->add_option("--speed-jump-limit", ingest_o.speed_jump_limit,
                         "repair threshold, knots per second");

    SegmentOpts segment_o;
    CLI::App* segment_c =
        app.add_subcommand("segment", "change-point segmentation and behavior labeling");
    segment_c->add_option("--input", segment_o.input, "sequences JSONL")->required();
    segment_c->add_option("--out", segment_o.out, "segments JSONL")->required();
    segment_c->add_option("--u", segment_o.cfg.stride_u, "pre-segment stride, points");
    segment_c->add_option("--lambda", segment_o.cfg.lambda, "window radius in pre-segments");
    segment_c->add_option("--delta", segment_o.cfg.delta, "change-point score threshold");
    segment_c->add_option("--sign-fraction", segment_o.cfg.speed_sign_fraction,
                          "same-sign share for accel/decel");
    segment_c->add_option("--stop-speed", segment_o.cfg.stop_speed, "stop threshold, knots");
    segment_c->add_option("--var-threshold", segment_o.cfg.speed_var_threshold,
                          "uniform-speed variance bound, knots^2");
    segment_c->add_option("--turn-threshold", segment_o.cfg.turn_threshold,
                          "turn threshold, degrees");

    LabelOpts label_o;
    CLI::App* label_c = app.add_subcommand("label", "map mooring segments to port label sequences");
    label_c->add_option("--input", label_o.input, "sequences JSONL")->required();
    label_c->add_option("--segments", label_o.segments, "segments JSONL")->required();
    label_c->add_option("--ports", label_o.ports, "ports CSV")->required();
    label_c->add_option("--out", label_o.out, "label sequences JSONL")->required();
    label_c->add_option("--sigma", label_o.sigma, "port matching radius, meters");
    label_c->add_option("--behavior", label_o.behavior,
                        "behavior filter: stopped, any, or a behavior name");

    TrainOpts train_o;
    CLI::App* train_c = app.add_subcommand("train", "train the predictive clustering model");
    train_c->add_option("--level", train_o.data.level, "subtraj or label");
    train_c->add_option("--input", train_o.data.input, "sequences or labels JSONL")->required();
    train_c->add_option("--segments", train_o.data.segments, "segments JSONL (subtraj level)");
    train_c->add_option("--grid-step", train_o.data.grid_step,
                        "label-level virtual grid step, seconds (0 = per label point)");
    train_c->add_option("--k", train_o.k, "cluster count")->required();
    train_c->add_option("--epochs", train_o.cfg.epochs, "training epochs");
    train_c->add_option("--pretrain-epochs", train_o.cfg.pretrain_epochs, "warm-up epochs");
    train_c->add_option("--batch", train_o.cfg.batch_size, "trajectories per batch");
    train_c->add_option("--lr", train_o.cfg.learning_rate, "Adam learning rate");
    train_c->add_option("--alpha", train_o.cfg.kl_weight, "KL term weight");
    train_c->add_option("--seed", train_o.cfg.seed, "seed for all randomness");
    train_c->add_option("--restarts", train_o.cfg.restarts, "training restarts, best final loss wins");
    train_c->add_option("--hidden", train_o.hidden, "latent dimension");
    train_c->add_option("--dropout-keep", train_o.dropout_keep, "dropout keep probability");
    train_c->add_option("--checkpoint", train_o.checkpoint, "checkpoint output")->required();
    train_c->add_option("--history", train_o.history, "loss history CSV");

    EvaluateOpts eval_o;
    CLI::App* eval_c = app.add_subcommand("evaluate", "score a checkpoint or sweep K");
    eval_c->add_option("--checkpoint", eval_o.checkpoint, "trained checkpoint");
    eval_c->add_option("--level", eval_o.data.level, "subtraj or label (sweep mode)");
    eval_c->add_option("--input", eval_o.data.input, "sequences or labels JSONL")->required();
    eval_c->add_option("--segments", eval_o.data.segments, "segments JSONL (subtraj level)");
    eval_c->add_option("--grid-step", eval_o.data.grid_step, "label-level grid step, seconds");
    eval_c->add_option("--truth", eval_o.truth, "truth column (vessel_type)");
    eval_c->add_option("--truth-file", eval_o.truth_file, "CSV mmsi,class overriding --truth");
    eval_c->add_option("--out", eval_o.out_csv, "metrics CSV")->required();
    eval_c->add_option("--per-step-out", eval_o.per_step_csv, "per-step metrics CSV");
    eval_c->add_option("--sweep-k", eval_o.sweep, "train and score a K range, e.g. 2..5");
    eval_c->add_option("--epochs", eval_o.cfg.epochs, "sweep training epochs");
    eval_c->add_option("--pretrain-epochs", eval_o.cfg.pretrain_epochs, "sweep warm-up epochs");
    eval_c->add_option("--batch", eval_o.cfg.batch_size, "sweep batch size");
    eval_c->add_option("--lr", eval_o.cfg.learning_rate, "sweep learning rate");
    eval_c->add_option("--alpha", eval_o.cfg.kl_weight, "sweep KL weight");
    eval_c->add_option("--seed", eval_o.cfg.seed, "sweep seed");
    eval_c->add_option("--restarts", eval_o.cfg.restarts, "sweep training restarts");
    eval_c->add_option("--hidden", eval_o.hidden, "sweep latent dimension");
    eval_c->add_option("--dropout-keep", eval_o.dropout_keep, "sweep dropout keep");

    TraceOpts trace_o;
    CLI::App* trace_c = app.add_subcommand("trace", "per-timestep cluster trace for one vessel");
    trace_c->add_option("--checkpoint", trace_o.checkpoint, "trained checkpoint")->required();
    trace_c->add_option("--input", trace_o.data.input, "sequences or labels JSONL")->required();
    trace_c->add_option("--segments", trace_o.data.segments, "segments JSONL (subtraj level)");
    trace_c->add_option("--grid-step", trace_o.data.grid_step, "label-level grid step, seconds");
    trace_c->add_option("--mmsi", trace_o.mmsi, "vessel identifier")->required();
    trace_c->add_option("--out", trace_o.out, "trace JSONL")->required();
    trace_c->add_option("--plot", trace_o.plot, "timeline SVG");

    std::vector<const char*> argv;
    argv.push_back("vbcluster");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    try {
        if (app.got_subcommand(synth_c)) cmd_synth(synth_o, out, err);
        else if (app.got_subcommand(ingest_c)) cmd_ingest(ingest_o, out, err);
        else if (app.got_subcommand(segment_c)) cmd_segment(segment_o, out, err);
        else if (app.got_subcommand(label_c)) cmd_label(label_o, out, err);
        else if (app.got_subcommand(train_c)) cmd_train(train_o, out, err);
        else if (app.got_subcommand(eval_c)) cmd_evaluate(eval_o, out, err);
        else if (app.got_subcommand(trace_c)) cmd_trace(trace_o, out, err);
        else {
            out << app.help();
            return 0;
        }
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace vbc
