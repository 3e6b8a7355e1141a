#pragma once

namespace vbc {

inline constexpr double kEarthRadiusMeters = 6371008.8;
inline constexpr double kKnotsToMps = 0.514444;

double deg2rad(double deg);

// Signed angular difference wrapped to (-180, 180].
double wrap_angle_deg(double delta_deg);

// Course wrapped to [0, 360).
double wrap_course_deg(double course_deg);

// Great-circle distance in meters.
double haversine_m(double lat1, double lon1, double lat2, double lon2);

// Initial bearing from (lat1,lon1) to (lat2,lon2), degrees in [0, 360).
double bearing_deg(double lat1, double lon1, double lat2, double lon2);

// Local tangent-plane dead reckoning: advance a lat/lon by (north, east) meters.
// Adequate below ~100 km; error under 0.1% at that scale.
void advance_local(double& lat, double& lon, double north_m, double east_m);

} // namespace vbc
