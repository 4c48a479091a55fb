#pragma once

#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

namespace drivesim {

struct Obstacle;

/// 60 mph in m/s.
inline constexpr double kSixtyMph = 26.8224;

struct DriverInput {
    double steering = 0.0;  ///< [-1, 1], positive = left
    double throttle = 0.0;  ///< [0, 1]
    double brake = 0.0;     ///< [0, 1]

    /// Copy with every field forced into its valid range. NaN maps to 0.
    DriverInput clamped() const;
    bool in_range() const;

    bool operator==(const DriverInput&) const = default;
};

/// Vehicle constants. The longitudinal pair is tuned so that full throttle
/// takes 0-60 mph in 12 s and full brake takes 60-0 mph in 4 s.
struct VehicleParams {
    double max_accel = kSixtyMph / 12.0;  ///< m/s^2 at throttle = 1
    double max_decel = kSixtyMph / 4.0;   ///< m/s^2 at brake = 1
    double wheelbase = 2.7;               ///< m
    double max_steer = 0.5236;            ///< rad road-wheel angle at steering = 1
    double k_roll_dyn = 0.03;             ///< roll cue per unit lateral accel
    double k_pitch_dyn = -0.02;           ///< pitch cue per unit longitudinal accel
};

struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double rot_x = 0.0;  ///< roll cue source [rad]
    double rot_y = 0.0;  ///< pitch cue source [rad]
    double rot_z = 0.0;  ///< heading, wrapped to (-pi, pi]
    double speed = 0.0;
    double yaw_rate = 0.0;
    double t = 0.0;

    bool operator==(const VehicleState&) const = default;
};

struct CollisionEvent {
    int obstacle_id = 0;
    double t = 0.0;
    double relative_speed = 0.0;

    bool operator==(const CollisionEvent&) const = default;
};

inline constexpr double kVehicleRadius = 2.0;
inline constexpr double kObstacleRadius = 1.0;
inline constexpr double kCollisionHysteresis = 0.5;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

double longitudinal_accel(const DriverInput& input, double speed,
                          const VehicleParams& params = {});

/// One explicit-Euler step of the kinematic bicycle. All derivatives use the
/// pre-step state; speed is clamped at zero after integration.
/// Throws std::invalid_argument for dt <= 0.
VehicleState integrate(const VehicleState& state, const DriverInput& input,
                       const VehicleParams& params, double dt);

/// Constant-velocity motion along each obstacle's heading.
void advance_obstacles(std::span<Obstacle> obstacles, double dt);

/// Nearest obstacle whose disc overlaps the vehicle disc, ties to lower id.
/// Stateless; see CollisionDetector for episode tracking.
std::optional<CollisionEvent> check_collision(const VehicleState& vehicle,
                                              std::span<const Obstacle> obstacles);

/// Tracks contact episodes so that each episode yields exactly one event.
/// An obstacle re-arms only after separation exceeds the contact distance
/// plus kCollisionHysteresis.
class CollisionDetector {
public:
    std::optional<CollisionEvent> update(const VehicleState& vehicle,
                                         std::span<const Obstacle> obstacles);
    bool in_contact(int obstacle_id) const { return contact_.contains(obstacle_id); }

private:
    std::unordered_set<int> contact_;
};

struct StepResult {
    VehicleState state;
    std::optional<CollisionEvent> collision;
};

/// Full world step: vehicle integration, obstacle motion, collision check.
StepResult step(const VehicleState& state, const DriverInput& input,
                std::vector<Obstacle>& obstacles, CollisionDetector& detector,
                const VehicleParams& params, double dt);

}  // namespace drivesim
