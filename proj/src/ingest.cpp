#include "vbc/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <istream>
#include <optional>
#include <stdexcept>

#include "vbc/errors.hpp"

namespace vbc {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

namespace {

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

bool looks_like_epoch(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::optional<std::int64_t> parse_epoch(const std::string& s) {
    if (!looks_like_epoch(s)) return std::nullopt;
    try {
        return std::stoll(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// "YYYY-MM-DD[T ]HH:MM:SS" with optional trailing 'Z'; treated as UTC.
std::optional<std::int64_t> parse_iso8601(const std::string& s) {
    std::tm tm{};
    int y, mo, d, h, mi, se;
    char sep;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &se) != 7)
        return std::nullopt;
    if (sep != 'T' && sep != ' ') return std::nullopt;
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = se;
    std::time_t t = timegm(&tm);
    if (t == static_cast<std::time_t>(-1)) return std::nullopt;
    return static_cast<std::int64_t>(t);
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw DataError("missing required column '" + name + "' in CSV header");
}

} // namespace

std::vector<PositionPoint> parse_ais_csv(std::istream& in, const CsvSchema& schema,
                                         ParseStats* stats) {
    ParseStats local;
    ParseStats& st = stats ? *stats : local;

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV input: no header row");
    std::vector<std::string> header = split_csv_line(line);

    const std::size_t c_mmsi = column_index(header, schema.mmsi);
    const std::size_t c_time = column_index(header, schema.timestamp);
    const std::size_t c_lat = column_index(header, schema.lat);
    const std::size_t c_lon = column_index(header, schema.lon);
    const std::size_t c_sog = column_index(header, schema.sog);
    const std::size_t c_cog = column_index(header, schema.cog);
    const std::size_t c_type = column_index(header, schema.vessel_type);
    const std::size_t need =
        std::max({c_mmsi, c_time, c_lat, c_lon, c_sog, c_cog, c_type}) + 1;

    // Timestamp convention fixed on first sight, not per row.
    enum class TsMode { unknown, epoch, iso } ts_mode = TsMode::unknown;

    std::vector<PositionPoint> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++st.rows_read;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() < need) {
            ++st.rows_malformed;
            continue;
        }

        std::optional<std::int64_t> t;
        if (ts_mode == TsMode::unknown) {
            // Lock the convention on the first row that parses.
            if (looks_like_epoch(f[c_time])) {
                t = parse_epoch(f[c_time]);
                if (t) ts_mode = TsMode::epoch;
            } else {
                t = parse_iso8601(f[c_time]);
                if (t) ts_mode = TsMode::iso;
            }
        } else {
            t = (ts_mode == TsMode::epoch) ? parse_epoch(f[c_time]) : parse_iso8601(f[c_time]);
        }
        std::optional<double> lat = parse_double(f[c_lat]);
        std::optional<double> lon = parse_double(f[c_lon]);
        std::optional<double> sog = parse_double(f[c_sog]);
        std::optional<double> cog = parse_double(f[c_cog]);
        if (!t || !lat || !lon || !sog || !cog || f[c_mmsi].empty()) {
            ++st.rows_malformed;
            continue;
        }
        if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0 || *sog < 0.0 ||
            *cog < 0.0 || *cog >= 360.0) {
            ++st.rows_out_of_bounds;
            continue;
        }

        PositionPoint p;
        p.mmsi = f[c_mmsi];
        p.timestamp = *t;
        p.lat = *lat;
        p.lon = *lon;
        p.sog = *sog;
        p.cog = *cog;
        p.vessel_type = vessel_type_from_string(f[c_type]);
        out.push_back(std::move(p));
        ++st.rows_kept;
    }
    return out;
}

std::vector<PositionSequence> group_by_vessel(const std::vector<PositionPoint>& points) {
    std::map<std::string, std::vector<PositionPoint>> groups;
    for (const PositionPoint& p : points) groups[p.mmsi].push_back(p);

    std::vector<PositionSequence> out;
    out.reserve(groups.size());
    for (auto& [mmsi, pts] : groups) {
        std::stable_sort(pts.begin(), pts.end(),
                         [](const PositionPoint& a, const PositionPoint& b) {
                             return a.timestamp < b.timestamp;
                         });
        PositionSequence seq;
        seq.mmsi = mmsi;
        seq.vessel_type = pts.front().vessel_type;
        for (PositionPoint& p : pts) {
            if (!seq.points.empty() && seq.points.back().timestamp == p.timestamp) continue;
            seq.points.push_back(std::move(p));
        }
        out.push_back(std::move(seq));
    }
    return out;
}

namespace {
double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
} // namespace

PositionSequence smooth(const PositionSequence& seq, int window, double speed_jump_limit) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("smooth: window must be a positive odd integer");
    if (speed_jump_limit <= 0.0)
        throw std::invalid_argument("smooth: speed_jump_limit must be positive");

    PositionSequence out = seq;
    const std::size_t n = out.points.size();
    const std::size_t radius = static_cast<std::size_t>(window / 2);

    for (std::size_t i = 1; i < n; ++i) {
        const PositionPoint& prev = out.points[i - 1];
        PositionPoint& cur = out.points[i];
        const double dt = static_cast<double>(cur.timestamp - prev.timestamp);
        if (dt <= 0.0) continue;
        const double accel = std::abs(cur.sog - prev.sog) / dt;
        if (accel <= speed_jump_limit) continue;

        const std::size_t lo = (i >= radius) ? i - radius : 0;
        const std::size_t hi = std::min(n - 1, i + radius);
        std::vector<double> lats, lons, sogs;
        for (std::size_t j = lo; j <= hi; ++j) {
            lats.push_back(seq.points[j].lat);
            lons.push_back(seq.points[j].lon);
            sogs.push_back(seq.points[j].sog);
        }
        cur.lat = median_of(lats);
        cur.lon = median_of(lons);
        cur.sog = median_of(sogs);
    }
    return out;
}

std::vector<PositionSequence> slice(const PositionSequence& seq, std::int64_t max_gap) {
    if (max_gap <= 0) throw std::invalid_argument("slice: max_gap must be positive");
    std::vector<PositionSequence> out;
    PositionSequence cur;
    cur.mmsi = seq.mmsi;
    cur.vessel_type = seq.vessel_type;
    for (std::size_t i = 0; i < seq.points.size(); ++i) {
        if (!cur.points.empty() &&
            seq.points[i].timestamp - cur.points.back().timestamp > max_gap) {
            out.push_back(std::move(cur));
            cur = PositionSequence{};
            cur.mmsi = seq.mmsi;
            cur.vessel_type = seq.vessel_type;
        }
        cur.points.push_back(seq.points[i]);
    }
    if (!cur.points.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<PositionSequence> filter_min_length(const std::vector<PositionSequence>& seqs,
                                                std::size_t min_points) {
    std::vector<PositionSequence> out;
    for (const PositionSequence& s : seqs)
        if (s.points.size() >= min_points) out.push_back(s);
    return out;
}

} // namespace vbc
