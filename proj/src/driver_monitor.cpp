#include "drivesim/driver_monitor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace drivesim {

void TouchCalibration::validate() const {
    if (std::find(kCalibrationResistors.begin(), kCalibrationResistors.end(), resistor_ohms) ==
        kCalibrationResistors.end())
        throw std::invalid_argument("resistor " + std::to_string(resistor_ohms) +
                                    " ohm is not a calibration value");
    if (!(c0 > threshold && threshold > 0.0))
        throw std::invalid_argument("touch calibration needs c0 > threshold > 0");
    if (!(d_half > 0.0)) throw std::invalid_argument("touch calibration needs d_half > 0");
}

double touch_response(double distance, const TouchCalibration& cal) {
    if (cal.resistor_ohms == kProductionResistor) return distance == 0.0 ? cal.c0 : 0.0;
    const double x = distance / cal.d_half;
    return std::round(cal.c0 * (cal.resistor_ohms / 13000.0) / (1.0 + x * x));
}

TouchSample sample_touch(std::span<const double, 4> hand_distances, const TouchCalibration& cal,
                         std::uint64_t t_us) {
    if (t_us % kTouchPeriodUs != 0)
        throw OffGridError("touch sample at t_us=" + std::to_string(t_us) +
                           " is off the 10 ms grid");
    TouchSample s;
    s.t_us = t_us;
    for (std::size_t i = 0; i < 4; ++i)
        s.quadrants[i] = touch_response(hand_distances[i], cal) >= cal.threshold;
    return s;
}

const char* to_string(PhoneEventKind k) noexcept {
    switch (k) {
        case PhoneEventKind::Ring: return "ring";
        case PhoneEventKind::Pickup: return "pickup";
        case PhoneEventKind::Touchscreen: return "touchscreen";
        case PhoneEventKind::Putdown: return "putdown";
    }
    return "unknown";
}

std::optional<PhoneEventKind> phone_kind_from_string(std::string_view s) noexcept {
    for (auto k : {PhoneEventKind::Ring, PhoneEventKind::Pickup, PhoneEventKind::Touchscreen,
                   PhoneEventKind::Putdown})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

std::span<const std::string_view> phone_questions() {
    static constexpr std::array<std::string_view, 12> questions{
        "What did you have for breakfast today?",
        "Are you free for dinner on Friday?",
        "What is 17 plus 25?",
        "Can you pick up milk on the way home?",
        "What time does your next meeting start?",
        "Which movie should we see this weekend?",
        "What is the capital of Australia?",
        "Did you remember to call the bank?",
        "How many days are in a leap year?",
        "Where should we meet for lunch?",
        "What color is your car?",
        "Can you send me the address again?",
    };
    return questions;
}

std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream) {
    // FNV-1a over the stream name, folded into the seed through splitmix64.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::uint64_t z = seed ^ h;
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

// Whether `kind` may follow `prev` within the ring/pickup/touch/putdown cycle.
bool may_follow(std::optional<PhoneEventKind> prev, PhoneEventKind kind) {
    switch (kind) {
        case PhoneEventKind::Ring: return !prev || *prev == PhoneEventKind::Putdown;
        case PhoneEventKind::Pickup: return prev == PhoneEventKind::Ring;
        case PhoneEventKind::Touchscreen:
        case PhoneEventKind::Putdown:
            return prev == PhoneEventKind::Pickup || prev == PhoneEventKind::Touchscreen;
    }
    return false;
}

}  // namespace

std::optional<std::size_t> find_order_violation(std::span<const PhoneEvent> events) {
    std::optional<PhoneEventKind> prev;
    std::uint64_t prev_t = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (i > 0 && e.t_us < prev_t) return i;
        if (!may_follow(prev, e.kind)) return i;
        if (e.kind == PhoneEventKind::Ring && e.question.empty()) return i;
        prev = e.kind;
        prev_t = e.t_us;
    }
    return std::nullopt;
}

// ---- PhoneSource ---------------------------------------------------------------

PhoneSource::PhoneSource(std::uint64_t seed, Mode mode, std::uint64_t grid_us)
    : rng_(stream_seed(seed, "phone")), mode_(mode), grid_us_(grid_us == 0 ? 1 : grid_us) {
    next_ring_us_ = draw_ring_gap_us();
}

double PhoneSource::uniform(double lo, double hi) {
    // 53 random bits -> [0, 1); mt19937_64 output is fully specified, unlike
    // the standard distributions.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::uint64_t PhoneSource::quantize(double seconds) const {
    const double ticks = std::round(seconds * 1e6 / static_cast<double>(grid_us_));
    return static_cast<std::uint64_t>(ticks) * grid_us_;
}

std::uint64_t PhoneSource::draw_ring_gap_us() { return quantize(uniform(30.0, 60.0)); }

void PhoneSource::schedule_episode(std::uint64_t ring_us) {
    const auto questions = phone_questions();
    const auto qi = static_cast<std::size_t>(rng_() % questions.size());
    pending_question_ = std::string(questions[qi]);
    queue_.push_back({ring_us, PhoneEventKind::Ring, pending_question_});
    if (mode_ == Mode::Interactive) return;

    std::uint64_t t = ring_us + std::max(grid_us_, quantize(uniform(1.0, 3.0)));
    queue_.push_back({t, PhoneEventKind::Pickup, {}});
    const int touches = 2 + static_cast<int>(rng_() % 5);
    for (int i = 0; i < touches; ++i) {
        t += std::max(grid_us_, quantize(uniform(0.5, 1.5)));
        queue_.push_back({t, PhoneEventKind::Touchscreen, {}});
    }
    t += std::max(grid_us_, quantize(uniform(0.5, 1.5)));
    queue_.push_back({t, PhoneEventKind::Putdown, {}});
}

std::vector<PhoneEvent> PhoneSource::poll(std::uint64_t now_us) {
    std::vector<PhoneEvent> out;
    for (;;) {
        if (queue_.empty()) {
            const bool episode_open = last_kind_ && *last_kind_ != PhoneEventKind::Putdown;
            if (episode_open || next_ring_us_ > now_us) break;
            // A ring held back by an open interactive episode goes out right
            // after the putdown, and the renewal restarts from there.
            const std::uint64_t ring = last_kind_ ? std::max(next_ring_us_, last_t_us_ + grid_us_)
                                                  : next_ring_us_;
            if (ring > now_us) break;
            schedule_episode(ring);
            next_ring_us_ = ring + draw_ring_gap_us();
        }
        if (queue_.front().t_us > now_us) break;
        out.push_back(std::move(queue_.front()));
        queue_.pop_front();
        last_kind_ = out.back().kind;
        last_t_us_ = out.back().t_us;
        if (out.back().kind == PhoneEventKind::Putdown) pending_question_.clear();
    }
    return out;
}

bool PhoneSource::acknowledge(PhoneEventKind kind, std::uint64_t now_us) {
    const auto latest = queue_.empty() ? last_kind_ : std::optional(queue_.back().kind);
    if (mode_ != Mode::Interactive || !latest) return false;
    if (kind == PhoneEventKind::Ring || !may_follow(latest, kind)) return false;
    const std::uint64_t latest_t = queue_.empty() ? last_t_us_ : queue_.back().t_us;
    queue_.push_back({std::max(now_us, latest_t), kind, {}});
    return true;
}

}  // namespace drivesim
