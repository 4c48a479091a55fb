#include "drivesim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drivesim {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

const char* to_string(RadarMount m) noexcept {
    switch (m) {
        case RadarMount::Front: return "front";
        case RadarMount::Left: return "left";
        case RadarMount::Right: return "right";
    }
    return "unknown";
}

std::optional<RadarMount> radar_mount_from_string(std::string_view s) noexcept {
    for (auto m : {RadarMount::Front, RadarMount::Left, RadarMount::Right})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

RadarConfig RadarConfig::front() { return {RadarMount::Front, 0.0, 90.0 * kDeg, 150.0}; }
RadarConfig RadarConfig::left() {
    return {RadarMount::Left, std::numbers::pi / 2, 90.0 * kDeg, 50.0};
}
RadarConfig RadarConfig::right() {
    return {RadarMount::Right, -std::numbers::pi / 2, 90.0 * kDeg, 50.0};
}

std::array<RadarConfig, 3> default_radars() {
    return {RadarConfig::front(), RadarConfig::left(), RadarConfig::right()};
}

std::vector<RadarReading> radar_scan(const RadarConfig& config, const VehicleState& vehicle,
                                     std::span<const Obstacle> obstacles) {
    std::vector<RadarReading> out;
    const double c = std::cos(vehicle.rot_z);
    const double s = std::sin(vehicle.rot_z);
    for (const auto& o : obstacles) {
        const double dx = o.x - vehicle.x;
        const double dy = o.y - vehicle.y;
        const double bx = c * dx + s * dy;
        const double by = -s * dx + c * dy;
        const double range = std::hypot(bx, by);
        if (range > config.max_range) continue;
        const double az = std::atan2(by, bx);
        if (std::abs(wrap_angle(az - config.boresight)) > 0.5 * config.fov) continue;
        out.push_back({o.id, wrap_angle(az), 0.0, range, o.speed, o.heading});
    }
    std::sort(out.begin(), out.end(), [](const RadarReading& a, const RadarReading& b) {
        return a.range != b.range ? a.range < b.range : a.object_id < b.object_id;
    });
    return out;
}

std::optional<int> lane_index(double offset, const Road& road) {
    if (!(std::abs(offset) <= road.half_width())) return std::nullopt;
    int k = 0;
    for (int j = 1; j < road.num_lanes(); ++j)
        if (offset > road.boundary_offset(j)) k = j;
    return k;
}

LaneMarkerReading lane_scan(const Road& road, const VehicleState& vehicle,
                            std::span<const double, 3> preview) {
    RoadProjection here;
    try {
        here = road.project(vehicle.x, vehicle.y);
    } catch (const RoadRangeError& e) {
        throw OffRoadError(std::string("vehicle off road: ") + e.what());
    }
    const double o = here.offset;
    const int n = road.num_lanes();
    // Off-road offsets are measured against the outermost lane, so one side
    // goes negative.
    const int k = o > road.half_width() ? n - 1 : lane_index(o, road).value_or(0);
    const double left_line = road.boundary_offset(k + 1);
    const double right_line = road.boundary_offset(k);

    LaneStation base;
    base.left_marker = left_line - o;
    base.right_marker = o - right_line;
    base.left_curb = road.half_width() - o;
    base.right_curb = o + road.half_width();

    LaneMarkerReading r;
    for (std::size_t i = 0; i < 4; ++i) {
        const double s = i == 0 ? here.s : std::min(here.s + preview[i - 1], road.total_length());
        r.stations[i] = base;
        r.stations[i].curvature = road.frame_at(s).curvature;
    }
    return r;
}

}  // namespace drivesim
