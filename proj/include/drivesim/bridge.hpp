#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drivesim/analysis.hpp"
#include "drivesim/telemetry.hpp"

namespace drivesim {

/// State pushed to the cockpit every 10th tick (20 Hz). Plain copies.
struct Snapshot {
    std::uint64_t t_us = 0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
    std::array<float, 4> attitude{};  ///< pitch, roll, yaw, heave
    SafetyState safety;
    bool motion_enabled = false;
    bool shake_active = false;
    NearestObjects nearest;
    std::optional<int> lane_index;
    std::array<bool, 4> touch{};
    std::optional<PhoneEventKind> last_phone_event;
    std::string question;  ///< non-empty while a ring is pending
    std::vector<Obstacle> obstacles;
};

/// `last_touch` carries quadrant state between touch ticks.
Snapshot make_snapshot(const TickFrame& frame, const std::array<bool, 4>& last_touch);

std::string snapshot_to_json(const Snapshot& s);

/// Sent once per connection so the client can draw the road.
std::string world_to_json(const Scenario& scenario, double sample_step = 2.0);

/// One cockpit input frame. Absent fields leave the held value unchanged.
struct InputMessage {
    std::optional<double> steering;
    std::optional<double> throttle;
    std::optional<double> brake;
    std::optional<bool> gate_closed;
    std::optional<bool> seatbelt_on;
    std::optional<bool> estop_local;
    std::optional<bool> estop_remote;
    std::optional<PhoneEventKind> phone_ack;  ///< pickup, touchscreen or putdown
};

/// Parses an input frame; unknown keys or wrong types give an error string.
std::variant<InputMessage, std::string> parse_input_message(std::string_view text);

std::string error_frame(std::string_view reason);

/// Single-slot mailbox between the bridge and the loop. Driver fields and
/// toggles are last-writer-wins; phone acknowledgements queue because they
/// are discrete events.
class InputMailbox {
public:
    explicit InputMailbox(SafetyState initial = {});

    /// Values are clamped on the way in.
    void apply(const InputMessage& msg);

    /// Current held input plus any queued acknowledgements (which are
    /// drained).
    TickInput take();

    std::uint64_t clamped_count() const;

private:
    mutable std::mutex mutex_;
    TickInput held_;
    std::uint64_t clamped_ = 0;
};

/// Parses one cockpit text frame into the mailbox. Returns an error frame for
/// the sender when the message is rejected (mailbox untouched), else empty.
std::string handle_input_frame(std::string_view text, InputMailbox& mailbox);

/// InputSource backed by a mailbox. Never exhausts. `before_tick`, when set,
/// runs on the loop thread ahead of each take() (used to feed scripted
/// messages deterministically).
class LiveInput : public InputSource {
public:
    explicit LiveInput(InputMailbox& mailbox) : mailbox_(mailbox) {}

    std::function<void(std::uint64_t index, InputMailbox&)> before_tick;

    std::optional<TickInput> next(std::uint64_t index, std::uint64_t t_us) override;
    bool interactive_phone() const override { return true; }
    std::uint64_t clamped_count() const override { return mailbox_.clamped_count(); }

private:
    InputMailbox& mailbox_;
};

}  // namespace drivesim
