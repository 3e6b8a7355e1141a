#include "vbc/jsonl.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "vbc/errors.hpp"
#include "vbc/ingest.hpp"

namespace vbc {

using json = nlohmann::ordered_json;

void write_sequences_jsonl(std::ostream& out, const std::vector<PositionSequence>& seqs) {
    for (const PositionSequence& s : seqs) {
        json rec;
        rec["mmsi"] = s.mmsi;
        json pts = json::array();
        for (const PositionPoint& p : s.points)
            pts.push_back(json::array({p.timestamp, p.lat, p.lon, p.sog, p.cog}));
        rec["points"] = std::move(pts);
        rec["vessel_type"] = to_string(s.vessel_type);
        out << rec.dump() << "\n";
    }
}

std::vector<PositionSequence> read_sequences_jsonl(std::istream& in) {
    std::vector<PositionSequence> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("sequences JSONL line " + std::to_string(lineno) + ": " + e.what());
        }
        PositionSequence seq;
        seq.mmsi = rec.at("mmsi").get<std::string>();
        seq.vessel_type = vessel_type_from_string(rec.at("vessel_type").get<std::string>());
        for (const json& p : rec.at("points")) {
            PositionPoint pt;
            pt.mmsi = seq.mmsi;
            pt.timestamp = p.at(0).get<std::int64_t>();
            pt.lat = p.at(1).get<double>();
            pt.lon = p.at(2).get<double>();
            pt.sog = p.at(3).get<double>();
            pt.cog = p.at(4).get<double>();
            pt.vessel_type = seq.vessel_type;
            seq.points.push_back(std::move(pt));
        }
        out.push_back(std::move(seq));
    }
    return out;
}

SegmentRecord to_record(const SubTrajectory& seg, std::size_t seq_index) {
    SegmentRecord r;
    r.mmsi = seg.parent_mmsi;
    r.seq = seq_index;
    r.start = seg.start_index;
    r.end = seg.end_index;
    r.behavior = behavior_name(seg.behavior);
    r.n_points = seg.points.size();
    if (!seg.points.empty()) {
        r.t_start = seg.points.front().timestamp;
        r.t_end = seg.points.back().timestamp;
        double sum = 0.0;
        for (const PositionPoint& p : seg.points) sum += p.sog;
        r.mean_sog = sum / static_cast<double>(seg.points.size());
    }
    return r;
}

void write_segments_jsonl(std::ostream& out, const std::vector<SegmentRecord>& segments) {
    for (const SegmentRecord& s : segments) {
        json rec;
        rec["mmsi"] = s.mmsi;
        rec["seq"] = s.seq;
        rec["start"] = s.start;
        rec["end"] = s.end;
        rec["behavior"] = s.behavior;
        rec["n_points"] = s.n_points;
        rec["t_start"] = s.t_start;
        rec["t_end"] = s.t_end;
        rec["mean_sog"] = s.mean_sog;
        out << rec.dump() << "\n";
    }
}

std::vector<SegmentRecord> read_segments_jsonl(std::istream& in) {
    std::vector<SegmentRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("segments JSONL line " + std::to_string(lineno) + ": " + e.what());
        }
        SegmentRecord r;
        r.mmsi = rec.at("mmsi").get<std::string>();
        r.seq = rec.at("seq").get<std::size_t>();
        r.start = rec.at("start").get<std::size_t>();
        r.end = rec.at("end").get<std::size_t>();
        r.behavior = rec.at("behavior").get<std::string>();
        r.n_points = rec.value("n_points", r.end - r.start + 1);
        r.t_start = rec.value("t_start", std::int64_t{0});
        r.t_end = rec.value("t_end", std::int64_t{0});
        r.mean_sog = rec.value("mean_sog", 0.0);
        out.push_back(std::move(r));
    }
    return out;
}

void write_label_sequences_jsonl(std::ostream& out, const std::vector<LabelSequence>& seqs) {
    for (const LabelSequence& s : seqs) {
        json rec;
        rec["mmsi"] = s.mmsi;
        rec["vessel_type"] = to_string(s.vessel_type);
        json pts = json::array();
        for (const LabelPoint& p : s.label_points)
            pts.push_back(
                json::array({p.timestamp, p.lat, p.lon, p.port_id, to_string(p.port_label)}));
        rec["labels"] = std::move(pts);
        out << rec.dump() << "\n";
    }
}

std::vector<LabelSequence> read_label_sequences_jsonl(std::istream& in) {
    std::vector<LabelSequence> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("labels JSONL line " + std::to_string(lineno) + ": " + e.what());
        }
        LabelSequence ls;
        ls.mmsi = rec.at("mmsi").get<std::string>();
        ls.vessel_type = vessel_type_from_string(rec.value("vessel_type", std::string("other")));
        for (const json& p : rec.at("labels")) {
            LabelPoint lp;
            lp.timestamp = p.at(0).get<std::int64_t>();
            lp.lat = p.at(1).get<double>();
            lp.lon = p.at(2).get<double>();
            lp.port_id = p.at(3).get<std::string>();
            lp.port_label = vessel_type_from_string(p.at(4).get<std::string>());
            ls.label_points.push_back(std::move(lp));
        }
        out.push_back(std::move(ls));
    }
    return out;
}

std::vector<Port> read_ports_csv(std::istream& in) {
    std::vector<Port> out;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() < 3) throw DataError("ports CSV line " + std::to_string(lineno) +
                                          ": expected port_id,lat,lon");
        if (first) {
            first = false;
            // Header row is optional; skip it when lat is not numeric.
            char* end = nullptr;
            std::strtod(f[1].c_str(), &end);
            if (end != f[1].c_str() + f[1].size()) continue;
        }
        Port p;
        p.id = f[0];
        try {
            p.lat = std::stod(f[1]);
            p.lon = std::stod(f[2]);
        } catch (const std::exception&) {
            throw DataError("ports CSV line " + std::to_string(lineno) + ": bad coordinates");
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_ais_csv(std::ostream& out, const std::vector<PositionSequence>& seqs) {
    out << "mmsi,timestamp,lat,lon,sog,cog,vessel_type\n";
    char buf[256];
    for (const PositionSequence& s : seqs) {
        for (const PositionPoint& p : s.points) {
            std::snprintf(buf, sizeof(buf), "%s,%lld,%.8f,%.8f,%.4f,%.4f,%s\n", s.mmsi.c_str(),
                          static_cast<long long>(p.timestamp), p.lat, p.lon, p.sog, p.cog,
                          to_string(s.vessel_type).c_str());
            out << buf;
        }
    }
}

} // namespace vbc
