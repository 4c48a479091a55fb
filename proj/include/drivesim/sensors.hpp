#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "drivesim/vehicle.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

enum class RadarMount { Front, Left, Right };

const char* to_string(RadarMount m) noexcept;
std::optional<RadarMount> radar_mount_from_string(std::string_view s) noexcept;

struct RadarConfig {
    RadarMount mount = RadarMount::Front;
    double boresight = 0.0;  ///< body frame, rad
    double fov = 0.0;        ///< full width, rad
    double max_range = 0.0;  ///< m

    static RadarConfig front();  ///< 0 rad, 90 deg, 150 m
    static RadarConfig left();   ///< +90 deg, 90 deg, 50 m
    static RadarConfig right();  ///< -90 deg, 90 deg, 50 m
};

/// Front, left, right in that order.
std::array<RadarConfig, 3> default_radars();

struct RadarReading {
    int object_id = 0;
    double azimuth = 0.0;    ///< body frame, positive left, (-pi, pi]
    double elevation = 0.0;  ///< planar world: always 0
    double range = 0.0;
    double object_speed = 0.0;    ///< world-frame scalar speed
    double object_heading = 0.0;  ///< world frame

    bool operator==(const RadarReading&) const = default;
};

/// Idealized sensor: every obstacle inside the angular sector and range,
/// with no noise or occlusion. Sorted by range, then id.
std::vector<RadarReading> radar_scan(const RadarConfig& config, const VehicleState& vehicle,
                                     std::span<const Obstacle> obstacles);

struct LaneStation {
    double left_marker = 0.0;
    double right_marker = 0.0;
    double left_curb = 0.0;
    double right_curb = 0.0;
    double curvature = 0.0;

    bool operator==(const LaneStation&) const = default;
};

struct LaneMarkerReading {
    std::array<LaneStation, 4> stations{};  ///< at vehicle, then the 3 previews
};

class OffRoadError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Lane index (0 = rightmost) for a lateral offset, or nullopt when
/// |offset| > half width. An offset exactly on a lane line belongs to the
/// lane on its right.
std::optional<int> lane_index(double offset, const Road& road);

/// Road data at the vehicle and at s + preview[k], clamped to the road end.
/// Every station uses the vehicle's current lateral offset. Throws
/// OffRoadError when the vehicle is outside the road's catchment.
LaneMarkerReading lane_scan(const Road& road, const VehicleState& vehicle,
                            std::span<const double, 3> preview);

}  // namespace drivesim
