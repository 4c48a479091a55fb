#include "drivesim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "drivesim/world.hpp"

namespace drivesim {

namespace {

double clamp_finite(double v, double lo, double hi) {
    if (std::isnan(v)) return 0.0;
    return std::clamp(v, lo, hi);
}

}  // namespace

DriverInput DriverInput::clamped() const {
    return {clamp_finite(steering, -1.0, 1.0), clamp_finite(throttle, 0.0, 1.0),
            clamp_finite(brake, 0.0, 1.0)};
}

bool DriverInput::in_range() const { return clamped() == *this; }

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    a = std::remainder(a, 2.0 * pi);  // [-pi, pi]
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

double longitudinal_accel(const DriverInput& input, double /*speed*/, const VehicleParams& params) {
    return params.max_accel * input.throttle - params.max_decel * input.brake;
}

VehicleState integrate(const VehicleState& s, const DriverInput& input, const VehicleParams& p,
                       double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integration step must be > 0");

    const double delta = p.max_steer * input.steering;
    const double yaw_rate = s.speed * std::tan(delta) / p.wheelbase;
    const double accel = longitudinal_accel(input, s.speed, p);

    VehicleState n = s;
    n.x = s.x + s.speed * std::cos(s.rot_z) * dt;
    n.y = s.y + s.speed * std::sin(s.rot_z) * dt;
    n.rot_z = wrap_angle(s.rot_z + yaw_rate * dt);
    n.speed = std::max(0.0, s.speed + accel * dt);
    n.yaw_rate = yaw_rate;
    n.t = s.t + dt;

    // A stationary car held on the brake does not pitch: the pitch cue uses
    // the acceleration actually realized over the step.
    const double realized = (n.speed - s.speed) / dt;
    n.rot_x = p.k_roll_dyn * s.speed * yaw_rate;
    n.rot_y = p.k_pitch_dyn * realized;
    n.z = 0.0;
    return n;
}

void advance_obstacles(std::span<Obstacle> obstacles, double dt) {
    for (auto& o : obstacles) {
        o.x += o.speed * std::cos(o.heading) * dt;
        o.y += o.speed * std::sin(o.heading) * dt;
    }
}

namespace {

constexpr double kContact = kVehicleRadius + kObstacleRadius;

double relative_speed(const VehicleState& v, const Obstacle& o) {
    const double dvx = v.speed * std::cos(v.rot_z) - o.speed * std::cos(o.heading);
    const double dvy = v.speed * std::sin(v.rot_z) - o.speed * std::sin(o.heading);
    return std::hypot(dvx, dvy);
}

}  // namespace

std::optional<CollisionEvent> check_collision(const VehicleState& vehicle,
                                              std::span<const Obstacle> obstacles) {
    const Obstacle* best = nullptr;
    double best_d = 0.0;
    for (const auto& o : obstacles) {
        const double d = std::hypot(o.x - vehicle.x, o.y - vehicle.y);
        if (!(d < kContact)) continue;
        if (!best || d < best_d || (d == best_d && o.id < best->id)) {
            best = &o;
            best_d = d;
        }
    }
    if (!best) return std::nullopt;
    return CollisionEvent{best->id, vehicle.t, relative_speed(vehicle, *best)};
}

std::optional<CollisionEvent> CollisionDetector::update(const VehicleState& vehicle,
                                                        std::span<const Obstacle> obstacles) {
    const Obstacle* best = nullptr;
    double best_d = 0.0;
    for (const auto& o : obstacles) {
        const double d = std::hypot(o.x - vehicle.x, o.y - vehicle.y);
        if (contact_.contains(o.id)) {
            if (d > kContact + kCollisionHysteresis) contact_.erase(o.id);
            continue;
        }
        if (!(d < kContact)) continue;
        contact_.insert(o.id);
        if (!best || d < best_d || (d == best_d && o.id < best->id)) {
            best = &o;
            best_d = d;
        }
    }
    if (!best) return std::nullopt;
    return CollisionEvent{best->id, vehicle.t, relative_speed(vehicle, *best)};
}

StepResult step(const VehicleState& state, const DriverInput& input,
                std::vector<Obstacle>& obstacles, CollisionDetector& detector,
                const VehicleParams& params, double dt) {
    StepResult r{integrate(state, input, params, dt), std::nullopt};
    advance_obstacles(obstacles, dt);
    r.collision = detector.update(r.state, obstacles);
    return r;
}

}  // namespace drivesim
