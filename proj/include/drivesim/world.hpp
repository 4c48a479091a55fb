#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/platform.hpp"
#include "drivesim/vehicle.hpp"

namespace drivesim {

/// Raised for malformed scenario documents and invariant violations.
/// `field()` names the offending JSON path (e.g. "road.lane_width"),
/// `line()` is non-zero for syntax errors.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string field, const std::string& what, int line = 0)
        : std::runtime_error(what), field_(std::move(field)), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

/// Query fell outside the road's arc-length range or lateral catchment.
class RoadRangeError : public std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  ///< rad, counter-clockwise from +x

    bool operator==(const Pose&) const = default;
};

enum class SegmentKind { Straight, Arc };

struct RoadSegment {
    SegmentKind kind = SegmentKind::Straight;
    double length = 0.0;            ///< arc length [m]
    double signed_curvature = 0.0;  ///< [1/m], positive curves left

    static RoadSegment straight(double length) { return {SegmentKind::Straight, length, 0.0}; }
    static RoadSegment arc(double length, double curvature) {
        return {SegmentKind::Arc, length, curvature};
    }
};

struct RoadFrame {
    Pose center;
    double curvature = 0.0;
};

struct RoadProjection {
    double s = 0.0;       ///< arc length of the nearest center-line point
    double offset = 0.0;  ///< signed lateral offset, positive left of travel
    double distance = 0.0;
};

/// Chain of constant-curvature segments with a lane layout. Each segment
/// starts at the previous segment's end pose, so the center line is C0 by
/// construction. Immutable after construction.
class Road {
public:
    Road(std::vector<RoadSegment> segments, double lane_width, int num_lanes, Pose origin);

    const std::vector<RoadSegment>& segments() const noexcept { return segments_; }
    double lane_width() const noexcept { return lane_width_; }
    int num_lanes() const noexcept { return num_lanes_; }
    const Pose& origin() const noexcept { return origin_; }
    double total_length() const noexcept { return total_length_; }
    double half_width() const noexcept { return 0.5 * num_lanes_ * lane_width_; }

    /// Lateral offset of boundary j, j = 0 (right curb) .. num_lanes (left curb).
    double boundary_offset(int j) const noexcept { return -half_width() + j * lane_width_; }
    /// Lateral offset of the center of lane k (lane 0 is rightmost).
    double lane_center(int k) const noexcept {
        return -half_width() + (k + 0.5) * lane_width_;
    }

    /// Center-line pose and curvature at arc length s. Throws RoadRangeError
    /// outside [0, total_length].
    RoadFrame frame_at(double s) const;

    /// Global nearest center-line point. Equidistant candidates resolve to
    /// the smallest s. Throws RoadRangeError when the point is farther than
    /// num_lanes * lane_width + 10 m from the center line.
    RoadProjection project(double x, double y) const;

    /// Like project() but without the catchment check.
    RoadProjection nearest(double x, double y) const;

    double catchment() const noexcept { return num_lanes_ * lane_width_ + 10.0; }

private:
    std::vector<RoadSegment> segments_;
    std::vector<Pose> starts_;      // start pose of each segment
    std::vector<double> start_s_;   // cumulative arc length at each segment start
    double lane_width_;
    int num_lanes_;
    Pose origin_;
    double total_length_ = 0.0;
};

RoadFrame road_frame_at(const Road& road, double s);
RoadProjection lateral_offset(const Road& road, double x, double y);

struct Obstacle {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;

    bool operator==(const Obstacle&) const = default;
};

/// Piecewise-constant hand-to-wheel distances for the four touch quadrants,
/// active from `t` [s] until the next entry.
struct HandTrackPoint {
    double t = 0.0;
    std::array<double, 4> distances{};
};

struct VehicleStart {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
};

struct Scenario {
    Road road;
    std::vector<Obstacle> obstacles;
    VehicleStart vehicle_start;
    std::uint64_t seed = 0;
    CueingGains gains;
    VehicleParams vehicle;
    std::array<double, 3> preview_distances{10.0, 20.0, 30.0};
    std::vector<HandTrackPoint> hand_tracks;

    /// Hand distances in effect at time t. Before the first track point (or
    /// with no track) both hands rest on Q1 and Q2 and Q3/Q4 are untouched.
    std::array<double, 4> hands_at(double t) const;
};

/// Parses and validates a JSON scenario document.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

}  // namespace drivesim
