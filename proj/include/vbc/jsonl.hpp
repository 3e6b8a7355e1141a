#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vbc/core.hpp"
#include "vbc/label_seq.hpp"

namespace vbc {

// One record per line:
// {"mmsi":...,"points":[[t,lat,lon,sog,cog],...],"vessel_type":...}
void write_sequences_jsonl(std::ostream& out, const std::vector<PositionSequence>& seqs);
std::vector<PositionSequence> read_sequences_jsonl(std::istream& in);

// One record per segment:
// {"mmsi":...,"seq":i,"start":...,"end":...,"behavior":"...","n_points":...,
//  "t_start":...,"t_end":...,"mean_sog":...}
// `seq` is the index of the owning sequence in the sequences file.
struct SegmentRecord {
    std::string mmsi;
    std::size_t seq = 0;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string behavior;
    std::size_t n_points = 0;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    double mean_sog = 0.0;
};

SegmentRecord to_record(const SubTrajectory& seg, std::size_t seq_index);
void write_segments_jsonl(std::ostream& out, const std::vector<SegmentRecord>& segments);
std::vector<SegmentRecord> read_segments_jsonl(std::istream& in);

// One record per vessel:
// {"mmsi":...,"vessel_type":...,"labels":[[t,lat,lon,port_id,category],...]}
void write_label_sequences_jsonl(std::ostream& out, const std::vector<LabelSequence>& seqs);
std::vector<LabelSequence> read_label_sequences_jsonl(std::istream& in);

// Ports file: CSV port_id,lat,lon (header optional).
std::vector<Port> read_ports_csv(std::istream& in);

void write_ais_csv(std::ostream& out, const std::vector<PositionSequence>& seqs);

} // namespace vbc
