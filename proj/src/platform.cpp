#include "drivesim/platform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "drivesim/vehicle.hpp"

namespace drivesim {

namespace {

float float_at_most(double limit) {
    float f = static_cast<float>(limit);
    if (static_cast<double>(f) > limit) f = std::nextafter(f, 0.0f);
    return f;
}

float clamp_axis(double v, float limit) {
    return std::clamp(static_cast<float>(v), -limit, limit);
}

}  // namespace

const float kPitchRollLimit = float_at_most(kNominalPitchRollLimit);
const float kHeaveLimit = float_at_most(kNominalHeaveLimit);

ShakeState trigger_shake(const CueingGains& gains, double t) {
    return {true, t, gains.shake_magnitude};
}

bool shake_running(const ShakeState& shake, const CueingGains& gains, double t) {
    return shake.active && t - shake.t_start < gains.shake_duration;
}

ShakeOffset shake_offset(const ShakeState& shake, const CueingGains& gains, double t) {
    if (!shake_running(shake, gains, t)) return {};
    const double tau = t - shake.t_start;
    if (tau < 0.0) return {};
    const double pitch = shake.magnitude * std::exp(-3.0 * tau / gains.shake_duration) *
                         std::sin(2.0 * std::numbers::pi * gains.shake_frequency * tau);
    constexpr double eps = 1e-12;
    return {pitch, 0.05 * (pitch / std::max(shake.magnitude, eps))};
}

PlatformCommand cue(const VehicleState& v, const CueingGains& g, const ShakeState& shake,
                    const SafetyState& safety, std::uint32_t seq) {
    PlatformCommand cmd;
    cmd.seq = seq;
    cmd.t_us = static_cast<std::uint64_t>(std::llround(std::max(0.0, v.t) * 1e6));
    cmd.flags.estop = safety.estop();
    if (!safety.motion_permitted()) return cmd;

    const ShakeOffset off = shake_offset(shake, g, v.t);
    cmd.pitch = clamp_axis(g.k_pitch * v.rot_y + off.pitch, kPitchRollLimit);
    cmd.roll = clamp_axis(g.k_roll * v.rot_x, kPitchRollLimit);
    cmd.yaw = static_cast<float>(g.k_yaw * v.rot_z);
    cmd.heave = clamp_axis(g.k_heave * 0.0 + off.heave, kHeaveLimit);
    cmd.flags.shake_active = shake_running(shake, g, v.t);
    cmd.flags.motion_enabled = true;
    return cmd;
}

}  // namespace drivesim
