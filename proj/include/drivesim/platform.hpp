#pragma once

#include <cstdint>

namespace drivesim {

struct VehicleState;

struct CueingGains {
    double k_pitch = 1.0;
    double k_roll = 1.0;
    double k_yaw = 1.0;
    double k_heave = 1.0;
    double shake_magnitude = 0.05;  ///< rad, peak pitch excursion
    double shake_frequency = 8.0;   ///< Hz
    double shake_duration = 1.0;    ///< s

    bool operator==(const CueingGains&) const = default;
};

/// Platform envelope. These are float bounds because axes travel as
/// float32 on the wire; each is the largest float not exceeding the nominal
/// limit (20 deg = 0.3491 rad on pitch/roll, 0.1 m on heave).
extern const float kPitchRollLimit;
extern const float kHeaveLimit;
inline constexpr double kNominalPitchRollLimit = 0.3491;
inline constexpr double kNominalHeaveLimit = 0.1;

struct CommandFlags {
    bool shake_active = false;
    bool estop = false;
    bool motion_enabled = false;

    std::uint8_t bits() const noexcept {
        return static_cast<std::uint8_t>((shake_active ? 0x01 : 0) | (estop ? 0x02 : 0) |
                                         (motion_enabled ? 0x04 : 0));
    }
    static CommandFlags from_bits(std::uint8_t b) noexcept {
        return {(b & 0x01) != 0, (b & 0x02) != 0, (b & 0x04) != 0};
    }
    bool operator==(const CommandFlags&) const = default;
};

struct PlatformCommand {
    std::uint32_t seq = 0;
    std::uint64_t t_us = 0;
    float pitch = 0.0f;  ///< rad
    float roll = 0.0f;   ///< rad
    float yaw = 0.0f;    ///< rad, continuous axis
    float heave = 0.0f;  ///< m
    CommandFlags flags;

    bool operator==(const PlatformCommand&) const = default;
};

struct SafetyState {
    bool gate_closed = true;
    bool seatbelt_on = true;
    bool estop_local = false;
    bool estop_remote = false;

    bool motion_permitted() const noexcept {
        return gate_closed && seatbelt_on && !estop_local && !estop_remote;
    }
    bool estop() const noexcept { return estop_local || estop_remote; }
    bool operator==(const SafetyState&) const = default;
};

struct ShakeState {
    bool active = false;
    double t_start = 0.0;
    double magnitude = 0.0;
};

struct ShakeOffset {
    double pitch = 0.0;  ///< rad
    double heave = 0.0;  ///< m
};

/// Starts (or restarts) the collision shake envelope at time t.
ShakeState trigger_shake(const CueingGains& gains, double t);

/// Decaying sinusoid on pitch with proportional heave. Zero when inactive
/// or once the envelope has run for shake_duration.
ShakeOffset shake_offset(const ShakeState& shake, const CueingGains& gains, double t);

/// Whether the envelope is still running at t.
bool shake_running(const ShakeState& shake, const CueingGains& gains, double t);

/// Maps a vehicle state onto a four-axis platform command. When the
/// interlock is not satisfied every axis is neutral and motion_enabled is
/// clear. The shake phase is evaluated at vstate.t.
PlatformCommand cue(const VehicleState& vstate, const CueingGains& gains, const ShakeState& shake,
                    const SafetyState& safety, std::uint32_t seq);

}  // namespace drivesim
