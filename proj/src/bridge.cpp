#include "drivesim/bridge.hpp"

#include <cmath>

#include <json.hpp>

namespace drivesim {

using nlohmann::json;

Snapshot make_snapshot(const TickFrame& frame, const std::array<bool, 4>& last_touch) {
    Snapshot s;
    s.t_us = frame.t_us;
    s.x = frame.vehicle.x;
    s.y = frame.vehicle.y;
    s.heading = frame.vehicle.rot_z;
    s.speed = frame.vehicle.speed;
    s.attitude = {frame.command.pitch, frame.command.roll, frame.command.yaw, frame.command.heave};
    s.safety = frame.safety;
    s.motion_enabled = frame.command.flags.motion_enabled;
    s.shake_active = frame.command.flags.shake_active;

    std::vector<RadarRow> rows;
    for (std::size_t k = 0; k < frame.radar.size(); ++k)
        for (const auto& r : frame.radar[k])
            rows.push_back({frame.t_us, static_cast<RadarMount>(k), r});
    s.nearest = nearest_objects(rows);
    s.nearest.t_us = frame.t_us;

    s.lane_index = frame.lane;
    s.touch = frame.touch ? frame.touch->quadrants : last_touch;
    s.last_phone_event = frame.last_phone_kind;
    s.question = frame.pending_question;
    s.obstacles = frame.obstacles;
    return s;
}

namespace {

// JSON has no NaN or infinity.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nearest_json(const std::optional<NearestObject>& o) {
    if (!o) return nullptr;
    return {{"object_id", o->object_id}, {"range", number(o->range)}, {"azimuth", number(o->azimuth)}};
}

}  // namespace

std::string snapshot_to_json(const Snapshot& s) {
    json j;
    j["type"] = "snapshot";
    j["t_us"] = s.t_us;
    j["vehicle"] = {{"x", number(s.x)}, {"y", number(s.y)}, {"heading", number(s.heading)},
                    {"speed", number(s.speed)}};
    j["attitude"] = {{"pitch", s.attitude[0]}, {"roll", s.attitude[1]}, {"yaw", s.attitude[2]},
                     {"heave", s.attitude[3]}};
    j["safety"] = {{"gate_closed", s.safety.gate_closed},
                   {"seatbelt_on", s.safety.seatbelt_on},
                   {"estop_local", s.safety.estop_local},
                   {"estop_remote", s.safety.estop_remote}};
    j["motion_enabled"] = s.motion_enabled;
    j["shake_active"] = s.shake_active;
    j["nearest"] = {{"front", nearest_json(s.nearest.front)},
                    {"left", nearest_json(s.nearest.left)},
                    {"right", nearest_json(s.nearest.right)}};
    j["lane_index"] = s.lane_index ? json(*s.lane_index) : json(nullptr);
    j["touch"] = s.touch;
    j["last_phone_event"] = s.last_phone_event ? json(to_string(*s.last_phone_event)) : json(nullptr);
    j["question"] = s.question;
    json obs = json::array();
    for (const auto& o : s.obstacles)
        obs.push_back({{"id", o.id}, {"x", number(o.x)}, {"y", number(o.y)},
                       {"heading", number(o.heading)}, {"speed", number(o.speed)}});
    j["obstacles"] = std::move(obs);
    return j.dump();
}

std::string world_to_json(const Scenario& scenario, double sample_step) {
    const Road& road = scenario.road;
    const double len = road.total_length();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / sample_step)));
    json center = json::array();
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = len * static_cast<double>(i) / static_cast<double>(n);
        const auto f = road.frame_at(s);
        center.push_back({{"s", s}, {"x", f.center.x}, {"y", f.center.y},
                          {"heading", f.center.heading}, {"curvature", f.curvature}});
    }
    json radars = json::array();
    for (const auto& r : default_radars())
        radars.push_back({{"mount", to_string(r.mount)}, {"boresight", r.boresight}, {"fov", r.fov},
                          {"max_range", r.max_range}});
    return json{{"type", "world"},
                {"lane_width", road.lane_width()},
                {"num_lanes", road.num_lanes()},
                {"center_line", std::move(center)},
                {"radars", std::move(radars)}}
        .dump();
}

std::variant<InputMessage, std::string> parse_input_message(std::string_view text) {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return std::string("malformed JSON");
    if (!j.is_object()) return std::string("input frame must be a JSON object");
    if (!j.contains("type") || j["type"] != "input") return std::string("expected \"type\":\"input\"");

    InputMessage m;
    for (const auto& [key, value] : j.items()) {
        if (key == "type") continue;
        auto number_field = [&](std::optional<double>& slot) -> std::optional<std::string> {
            if (!value.is_number()) return key + " must be a number";
            slot = value.get<double>();
            return std::nullopt;
        };
        auto bool_field = [&](std::optional<bool>& slot) -> std::optional<std::string> {
            if (!value.is_boolean()) return key + " must be a boolean";
            slot = value.get<bool>();
            return std::nullopt;
        };
        std::optional<std::string> err;
        if (key == "steering") err = number_field(m.steering);
        else if (key == "throttle") err = number_field(m.throttle);
        else if (key == "brake") err = number_field(m.brake);
        else if (key == "gate_closed") err = bool_field(m.gate_closed);
        else if (key == "seatbelt_on") err = bool_field(m.seatbelt_on);
        else if (key == "estop_local") err = bool_field(m.estop_local);
        else if (key == "estop_remote") err = bool_field(m.estop_remote);
        else if (key == "phone_ack") {
            const auto kind = value.is_string() ? phone_kind_from_string(value.get<std::string>())
                                                : std::nullopt;
            if (!kind || *kind == PhoneEventKind::Ring)
                err = "phone_ack must be pickup, touchscreen or putdown";
            else
                m.phone_ack = kind;
        } else {
            err = "unknown field " + key;
        }
        if (err) return *err;
    }
    return m;
}

std::string error_frame(std::string_view reason) {
    return json{{"type", "error"}, {"reason", reason}}.dump();
}

InputMailbox::InputMailbox(SafetyState initial) { held_.safety = initial; }

void InputMailbox::apply(const InputMessage& msg) {
    std::lock_guard lock(mutex_);
    DriverInput raw = held_.driver;
    if (msg.steering) raw.steering = *msg.steering;
    if (msg.throttle) raw.throttle = *msg.throttle;
    if (msg.brake) raw.brake = *msg.brake;
    const DriverInput c = raw.clamped();
    if (!(c == raw)) ++clamped_;
    held_.driver = c;
    if (msg.gate_closed) held_.safety.gate_closed = *msg.gate_closed;
    if (msg.seatbelt_on) held_.safety.seatbelt_on = *msg.seatbelt_on;
    if (msg.estop_local) held_.safety.estop_local = *msg.estop_local;
    if (msg.estop_remote) held_.safety.estop_remote = *msg.estop_remote;
    if (msg.phone_ack) held_.phone_acks.push_back(*msg.phone_ack);
}

TickInput InputMailbox::take() {
    std::lock_guard lock(mutex_);
    TickInput out = held_;
    held_.phone_acks.clear();
    return out;
}

std::uint64_t InputMailbox::clamped_count() const {
    std::lock_guard lock(mutex_);
    return clamped_;
}

std::optional<TickInput> LiveInput::next(std::uint64_t index, std::uint64_t) {
    if (before_tick) before_tick(index, mailbox_);
    return mailbox_.take();
}

std::string handle_input_frame(std::string_view text, InputMailbox& mailbox) {
    auto parsed = parse_input_message(text);
    if (auto* err = std::get_if<std::string>(&parsed)) return error_frame(*err);
    mailbox.apply(std::get<InputMessage>(parsed));
    return {};
}

}  // namespace drivesim
