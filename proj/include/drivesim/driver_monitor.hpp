#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drivesim {

/// Resistor values swept during wheel-sensor calibration. 13 kOhm is the
/// production value: it responds only on contact.
inline constexpr std::array<int, 5> kCalibrationResistors{5100, 13000, 22000, 51000, 100000};
inline constexpr int kProductionResistor = 13000;

/// Touch sensor grid period.
inline constexpr std::uint64_t kTouchPeriodUs = 10'000;

struct TouchCalibration {
    int resistor_ohms = kProductionResistor;
    double c0 = 1000.0;      ///< counts at contact
    double d_half = 0.02;    ///< m, half-response distance
    double threshold = 500;  ///< counts

    /// Throws std::invalid_argument on an unknown resistor or bad constants.
    void validate() const;
};

/// Sensor counts for a hand at `distance` metres from the painted quadrant.
/// Off-production resistors follow a Lorentzian falloff scaled by
/// R / 13 kOhm; the production resistor is boolean (c0 on contact, else 0).
double touch_response(double distance, const TouchCalibration& cal = {});

struct TouchSample {
    std::uint64_t t_us = 0;
    std::array<bool, 4> quadrants{};  ///< Q1..Q4

    std::uint8_t mask() const noexcept {
        std::uint8_t m = 0;
        for (int i = 0; i < 4; ++i)
            if (quadrants[i]) m |= static_cast<std::uint8_t>(1u << i);
        return m;
    }
    bool operator==(const TouchSample&) const = default;
};

class OffGridError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Quadrant k is triggered iff touch_response(distance_k) >= threshold.
/// Throws OffGridError when t_us is not a multiple of 10 ms.
TouchSample sample_touch(std::span<const double, 4> hand_distances, const TouchCalibration& cal,
                         std::uint64_t t_us);

enum class PhoneEventKind : std::uint8_t { Ring = 0, Pickup = 1, Touchscreen = 2, Putdown = 3 };

const char* to_string(PhoneEventKind k) noexcept;
std::optional<PhoneEventKind> phone_kind_from_string(std::string_view s) noexcept;

struct PhoneEvent {
    std::uint64_t t_us = 0;
    PhoneEventKind kind = PhoneEventKind::Ring;
    std::string question;  ///< ring events only

    bool operator==(const PhoneEvent&) const = default;
};

/// Built-in distraction prompts.
std::span<const std::string_view> phone_questions();

/// Deterministic 64-bit sub-seed for a named random stream.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream);

/// Checks ring -> pickup -> touchscreen* -> putdown ordering with no
/// interleaving. Returns the index of the first offending event, or nullopt.
std::optional<std::size_t> find_order_violation(std::span<const PhoneEvent> events);

/// Texting-distraction event source.
///
/// Rings form a renewal process with Uniform[30, 60] s inter-arrival. In
/// scripted mode each ring is followed by pickup after Uniform[1, 3] s,
/// 2-6 touchscreen events at Uniform[0.5, 1.5] s spacing, and a putdown
/// Uniform[0.5, 1.5] s after the last touch. In interactive mode only rings
/// are generated and the follow-ups come from acknowledge().
///
/// All times are quantized to `grid_us` (the loop tick) so that events land
/// on tick boundaries.
class PhoneSource {
public:
    enum class Mode { Scripted, Interactive };

    PhoneSource(std::uint64_t seed, Mode mode = Mode::Scripted, std::uint64_t grid_us = 5000);

    /// Events with t_us <= now_us not yet emitted, in time order.
    std::vector<PhoneEvent> poll(std::uint64_t now_us);

    /// Interactive mode only: records a pickup/touchscreen/putdown at now_us.
    /// Returns false (and emits nothing) if the kind is out of order.
    bool acknowledge(PhoneEventKind kind, std::uint64_t now_us);

    /// Pending question while a ring has not been put down, else empty.
    const std::string& pending_question() const noexcept { return pending_question_; }

    /// Draws the next inter-ring gap in microseconds (exposed for testing
    /// the distribution without running episodes).
    std::uint64_t draw_ring_gap_us();

private:
    double uniform(double lo, double hi);
    std::uint64_t quantize(double seconds) const;
    void schedule_episode(std::uint64_t ring_us);

    std::mt19937_64 rng_;
    Mode mode_;
    std::uint64_t grid_us_;
    std::uint64_t next_ring_us_ = 0;
    std::deque<PhoneEvent> queue_;
    std::optional<PhoneEventKind> last_kind_;
    std::uint64_t last_t_us_ = 0;
    std::string pending_question_;
};

}  // namespace drivesim
