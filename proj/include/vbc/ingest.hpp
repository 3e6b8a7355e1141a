#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vbc/core.hpp"

namespace vbc {

// Column-name mapping for AIS CSV exports; defaults match the schema
// mmsi,timestamp,lat,lon,sog,cog,vessel_type.
struct CsvSchema {
    std::string mmsi = "mmsi";
    std::string timestamp = "timestamp";
    std::string lat = "lat";
    std::string lon = "lon";
    std::string sog = "sog";
    std::string cog = "cog";
    std::string vessel_type = "vessel_type";
};

struct ParseStats {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::size_t rows_malformed = 0;     // unparseable cells
    std::size_t rows_out_of_bounds = 0; // value bounds violations
};

// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

// Parses a header-first AIS CSV stream. Malformed rows are counted and
// skipped; a missing required column throws DataError. Timestamps may be
// epoch seconds or ISO-8601; the convention is detected once per file.
std::vector<PositionPoint> parse_ais_csv(std::istream& in, const CsvSchema& schema,
                                         ParseStats* stats = nullptr);

// Groups by mmsi (output ordered by mmsi), sorts each group by timestamp,
// drops exact duplicate (mmsi, timestamp) keeping the first seen.
std::vector<PositionSequence> group_by_vessel(const std::vector<PositionPoint>& points);

// Median-repairs points whose point-to-point speed change rate exceeds
// speed_jump_limit (knots per second). Positions and sog are replaced by the
// median of the surrounding window; timestamps are untouched. The outlier
// test runs left to right against already-repaired predecessors, so a lone
// spike does not drag its successor into repair.
PositionSequence smooth(const PositionSequence& seq, int window, double speed_jump_limit);

// Splits at every consecutive time gap strictly greater than max_gap seconds.
std::vector<PositionSequence> slice(const PositionSequence& seq, std::int64_t max_gap);

std::vector<PositionSequence> filter_min_length(const std::vector<PositionSequence>& seqs,
                                                std::size_t min_points);

} // namespace vbc
