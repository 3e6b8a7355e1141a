#include "vbc/geo.hpp"

#include <cmath>

namespace vbc {

namespace {
constexpr double kPi = 3.14159265358979323846;
// Meters per degree of latitude (spherical mean).
constexpr double kMetersPerDegLat = kEarthRadiusMeters * kPi / 180.0;
} // namespace

double deg2rad(double deg) { return deg * kPi / 180.0; }

double wrap_angle_deg(double delta_deg) {
    double w = std::fmod(delta_deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

double wrap_course_deg(double course_deg) {
    double w = std::fmod(course_deg, 360.0);
    if (w < 0.0) w += 360.0;
    return w;
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    double dlat = deg2rad(lat2 - lat1);
    double dlon = deg2rad(lon2 - lon1);
    double s1 = std::sin(dlat / 2.0);
    double s2 = std::sin(dlon / 2.0);
    double a = s1 * s1 + s2 * s2 * std::cos(deg2rad(lat1)) * std::cos(deg2rad(lat2));
    if (a > 1.0) a = 1.0;
    if (a < 0.0) a = 0.0;
    double c = 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
    return kEarthRadiusMeters * c;
}

double bearing_deg(double lat1, double lon1, double lat2, double lon2) {
    double phi1 = deg2rad(lat1);
    double phi2 = deg2rad(lat2);
    double dlon = deg2rad(lon2 - lon1);
    double y = std::sin(dlon) * std::cos(phi2);
    double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlon);
    return wrap_course_deg(std::atan2(y, x) * 180.0 / kPi);
}

void advance_local(double& lat, double& lon, double north_m, double east_m) {
    lat += north_m / kMetersPerDegLat;
    lon += east_m / (kMetersPerDegLat * std::cos(deg2rad(lat)));
}

} // namespace vbc
