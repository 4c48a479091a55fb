#include "drivesim/telemetry.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <thread>

#include <openssl/evp.h>

#include <json.hpp>

#include "csv.hpp"

namespace drivesim {

namespace fs = std::filesystem;

std::uint64_t LoopConfig::tick_count() const {
    if (tick != kTick) throw std::invalid_argument("tick is fixed at 0.005 s (200 Hz)");
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw std::invalid_argument("duration must be > 0");
    const double n = std::round(duration / tick);
    if (std::abs(n * tick - duration) > 1e-9)
        throw std::invalid_argument("duration must be a whole number of 5 ms ticks");
    return static_cast<std::uint64_t>(n);
}

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

bool LaneRow::operator==(const LaneRow& o) const {
    return t_us == o.t_us && station == o.station && same(data.left_marker, o.data.left_marker) &&
           same(data.right_marker, o.data.right_marker) &&
           same(data.left_curb, o.data.left_curb) && same(data.right_curb, o.data.right_curb) &&
           same(data.curvature, o.data.curvature);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

// ---- input sources -------------------------------------------------------------

InputExhausted::InputExhausted(std::uint64_t tick)
    : std::runtime_error("input source exhausted at tick " + std::to_string(tick)), tick_(tick) {}

TableInput::TableInput(std::vector<InputRow> rows, SafetyState safety)
    : rows_(std::move(rows)), safety_(safety) {}

std::optional<TickInput> TableInput::next(std::uint64_t index, std::uint64_t t_us) {
    if (index >= rows_.size()) return std::nullopt;
    const auto& row = rows_[index];
    if (row.t_us != t_us)
        throw std::runtime_error("input row " + std::to_string(index) + " has t_us " +
                                 std::to_string(row.t_us) + ", expected " + std::to_string(t_us));
    TickInput in;
    in.driver = row.input.clamped();
    if (!(in.driver == row.input)) ++clamped_;
    in.safety = safety_;
    return in;
}

ConstantInput::ConstantInput(DriverInput input, SafetyState safety) {
    value_.driver = input.clamped();
    value_.safety = safety;
}

std::optional<TickInput> ConstantInput::next(std::uint64_t, std::uint64_t) { return value_; }

namespace {

constexpr std::string_view kInputCols[] = {"t_us", "steering", "throttle", "brake"};
constexpr std::string_view kVehicleCols[] = {"t_us",  "x",     "y",       "z",        "rot_x",
                                             "rot_y", "rot_z", "speed", "heading", "yaw_rate"};
constexpr std::string_view kRadarCols[] = {"t_us",  "sensor",       "object_id",
                                           "azimuth", "elevation",  "range",
                                           "object_speed", "object_heading"};
constexpr std::string_view kLaneCols[] = {"t_us",      "station",    "left_marker", "right_marker",
                                          "left_curb", "right_curb", "curvature"};
constexpr std::string_view kTouchCols[] = {"t_us", "q1", "q2", "q3", "q4"};
constexpr std::string_view kPhoneCols[] = {"t_us", "kind", "question"};
constexpr std::string_view kPlatformCols[] = {"t_us", "seq",   "pitch", "roll",
                                              "yaw",  "heave", "flags"};

template <std::size_t N>
std::vector<std::string_view> cols(const std::string_view (&c)[N]) {
    return {c, c + N};
}

template <std::size_t N>
std::string header_line(const std::string_view (&c)[N]) {
    std::string s;
    for (std::size_t i = 0; i < N; ++i) {
        if (i) s.push_back(',');
        s.append(c[i]);
    }
    s.push_back('\n');
    return s;
}

std::vector<InputRow> parse_input_table(const csv::Table& t) {
    csv::Reader r(t, cols(kInputCols));
    std::vector<InputRow> rows(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        rows[i].t_us = r.get<std::uint64_t>(i, 0);
        rows[i].input = {r.get<double>(i, 1), r.get<double>(i, 2), r.get<double>(i, 3)};
    }
    return rows;
}

}  // namespace

std::unique_ptr<InputSource> load_input_script(const fs::path& path) {
    const auto table = csv::parse(csv::read_file(path), path.string());
    try {
        return std::make_unique<TableInput>(parse_input_table(table));
    } catch (const csv::ColumnError& e) {
        throw LogFormatError(path.string(), e.column, e.what());
    }
}

std::unique_ptr<InputSource> replay(const RunLog& log) {
    return std::make_unique<TableInput>(log.input);
}

// ---- the loop ------------------------------------------------------------------

Simulation::Simulation(Scenario scenario, std::string scenario_document, LoopConfig config,
                       bool interactive_phone)
    : scenario_(std::move(scenario)), config_(config), radars_(default_radars()),
      obstacles_(scenario_.obstacles),
      phone_(config.seed.value_or(scenario_.seed),
             interactive_phone ? PhoneSource::Mode::Interactive : PhoneSource::Mode::Scripted,
             kTickUs) {
    config_.tick_count();  // validates
    const auto& vs = scenario_.vehicle_start;
    vehicle_.x = vs.x;
    vehicle_.y = vs.y;
    vehicle_.rot_z = wrap_angle(vs.heading);
    vehicle_.speed = vs.speed;

    log_.header.scenario_sha256 = sha256_hex(scenario_document);
    log_.header.seed = config.seed.value_or(scenario_.seed);
    log_.header.tick = config_.tick;
    log_.scenario_document = std::move(scenario_document);
}

const TickFrame& Simulation::advance(const TickInput& in, const RunHooks& hooks) {
    const std::uint64_t i = index_;
    const std::uint64_t t_us = (i + 1) * kTickUs;
    const double t = static_cast<double>(t_us) / 1e6;
    const DriverInput driver = in.driver.clamped();

    for (auto kind : in.phone_acks) phone_.acknowledge(kind, t_us);

    auto res = step(vehicle_, driver, obstacles_, collisions_, scenario_.vehicle, config_.tick);
    vehicle_ = res.state;
    vehicle_.t = t;
    if (res.collision) {
        res.collision->t = t;
        shake_ = trigger_shake(scenario_.gains, t);
    }

    const PlatformCommand cmd =
        cue(vehicle_, scenario_.gains, shake_, in.safety, static_cast<std::uint32_t>(i));
    if (hooks.platform) {
        const Bytes packet = encode_command(cmd);
        hooks.platform(packet);
    }

    TickFrame& f = frame_;
    f.index = i;
    f.t_us = t_us;
    f.input = driver;
    f.vehicle = vehicle_;
    f.safety = in.safety;
    f.shake_active = shake_running(shake_, scenario_.gains, t);
    f.command = cmd;
    f.collision = res.collision;
    f.obstacles = obstacles_;

    log_.input.push_back({t_us, driver});
    log_.vehicle.push_back({t_us, vehicle_});

    for (std::size_t k = 0; k < radars_.size(); ++k) {
        f.radar[k] = radar_scan(radars_[k], vehicle_, obstacles_);
        for (const auto& r : f.radar[k]) log_.radar.push_back({t_us, radars_[k].mount, r});
    }

    LaneMarkerReading lanes;
    try {
        lanes = lane_scan(scenario_.road, vehicle_, scenario_.preview_distances);
        const double o = scenario_.road.project(vehicle_.x, vehicle_.y).offset;
        f.lane_offset = o;
        f.lane = lane_index(o, scenario_.road);
    } catch (const OffRoadError&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        lanes.stations.fill({nan, nan, nan, nan, nan});
        f.lane_offset.reset();
        f.lane.reset();
    }
    for (int k = 0; k < 4; ++k) log_.lane.push_back({t_us, k, lanes.stations[k]});

    f.touch.reset();
    if (t_us % kTouchPeriodUs == 0) {
        const auto hands = scenario_.hands_at(t);
        const TouchSample s = sample_touch(std::span<const double, 4>(hands), touch_cal_, t_us);
        log_.touch.push_back(s);
        f.touch = s;
        if (hooks.touch) hooks.touch(s);
    }

    f.phone = phone_.poll(t_us);
    for (const auto& e : f.phone) {
        log_.phone.push_back(e);
        last_phone_kind_ = e.kind;
        if (hooks.phone) hooks.phone(e);
    }
    f.last_phone_kind = last_phone_kind_;
    f.pending_question = phone_.pending_question();

    log_.platform.push_back(
        {t_us, cmd.seq, cmd.pitch, cmd.roll, cmd.yaw, cmd.heave, cmd.flags.bits()});

    ++index_;
    if (hooks.on_tick) hooks.on_tick(f);
    return f;
}

RunLog run(const Scenario& scenario, const std::string& scenario_document,
           const LoopConfig& config, InputSource& driver, const RunHooks& hooks) {
    const std::uint64_t n = config.tick_count();
    Simulation sim(scenario, scenario_document, config, driver.interactive_phone());
    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < n; ++i) {
        if (hooks.stop_requested && hooks.stop_requested()) break;
        auto in = driver.next(i, (i + 1) * kTickUs);
        if (!in) throw InputExhausted(i);
        sim.advance(*in, hooks);
        if (config.realtime)
            std::this_thread::sleep_until(start + std::chrono::microseconds((i + 1) * kTickUs));
    }
    return sim.take_log();
}

// ---- persistence ---------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> serialize_tables(const RunLog& log) {
    std::vector<std::pair<std::string, std::string>> files;

    std::string s = header_line(kInputCols);
    for (const auto& r : log.input)
        csv::Row(s).num(r.t_us).num(r.input.steering).num(r.input.throttle).num(r.input.brake);
    files.emplace_back("input.csv", std::move(s));

    s = header_line(kVehicleCols);
    for (const auto& r : log.vehicle) {
        const auto& v = r.state;
        csv::Row(s).num(r.t_us).num(v.x).num(v.y).num(v.z).num(v.rot_x).num(v.rot_y).num(v.rot_z)
            .num(v.speed).num(v.rot_z).num(v.yaw_rate);
    }
    files.emplace_back("vehicle.csv", std::move(s));

    s = header_line(kRadarCols);
    for (const auto& r : log.radar) {
        const auto& d = r.reading;
        csv::Row(s).num(r.t_us).text(to_string(r.sensor)).num(d.object_id).num(d.azimuth)
            .num(d.elevation).num(d.range).num(d.object_speed).num(d.object_heading);
    }
    files.emplace_back("radar.csv", std::move(s));

    s = header_line(kLaneCols);
    for (const auto& r : log.lane) {
        const auto& d = r.data;
        csv::Row(s).num(r.t_us).num(r.station).num(d.left_marker).num(d.right_marker)
            .num(d.left_curb).num(d.right_curb).num(d.curvature);
    }
    files.emplace_back("lane.csv", std::move(s));

    s = header_line(kTouchCols);
    for (const auto& r : log.touch) {
        csv::Row row(s);
        row.num(r.t_us);
        for (bool q : r.quadrants) row.num(q ? 1 : 0);
    }
    files.emplace_back("touch.csv", std::move(s));

    s = header_line(kPhoneCols);
    for (const auto& r : log.phone) csv::Row(s).num(r.t_us).text(to_string(r.kind)).text(r.question);
    files.emplace_back("phone.csv", std::move(s));

    s = header_line(kPlatformCols);
    for (const auto& r : log.platform)
        csv::Row(s).num(r.t_us).num(r.seq).num(r.pitch).num(r.roll).num(r.yaw).num(r.heave)
            .num(static_cast<unsigned>(r.flags));
    files.emplace_back("platform.csv", std::move(s));

    return files;
}

namespace {

std::string header_json(const LogHeader& h) {
    nlohmann::ordered_json j;
    j["scenario_sha256"] = h.scenario_sha256;
    j["seed"] = h.seed;
    j["tick"] = h.tick;
    j["version"] = h.version;
    return j.dump(2) + "\n";
}

}  // namespace

void write_log(const RunLog& log, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, text] : serialize_tables(log)) csv::write_file(dir / name, text);
    csv::write_file(dir / "header.json", header_json(log.header));
    csv::write_file(dir / "scenario.json", log.scenario_document);
}

namespace {

csv::Table load_table(const fs::path& dir, const char* name) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw LogFormatError(name, "", "missing table " + p.string());
    return csv::parse(csv::read_file(p), name);
}

template <typename Fn>
auto with_columns(const char* file, Fn&& fn) {
    try {
        return fn();
    } catch (const csv::ColumnError& e) {
        throw LogFormatError(file, e.column, e.what());
    }
}

bool parse_bit(const csv::Reader& r, std::size_t row, std::size_t col) {
    const int v = r.get<int>(row, col);
    if (v != 0 && v != 1)
        throw csv::ColumnError(std::string(kTouchCols[col]), "touch quadrant must be 0 or 1");
    return v == 1;
}

}  // namespace

ReadLogResult read_log_checked(const fs::path& dir) {
    ReadLogResult result;
    RunLog& log = result.log;

    {
        const fs::path hp = dir / "header.json";
        if (!fs::exists(hp)) throw LogFormatError("header.json", "", "missing " + hp.string());
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(csv::read_file(hp));
        } catch (const nlohmann::json::exception& e) {
            throw LogFormatError("header.json", "", std::string("header.json: ") + e.what());
        }
        for (const char* key : {"scenario_sha256", "seed", "tick", "version"})
            if (!j.contains(key))
                throw LogFormatError("header.json", key,
                                     std::string("header.json: missing field '") + key + "'");
        try {
            log.header.scenario_sha256 = j.at("scenario_sha256").get<std::string>();
            log.header.seed = j.at("seed").get<std::uint64_t>();
            log.header.tick = j.at("tick").get<double>();
            log.header.version = j.at("version").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw LogFormatError("header.json", "", std::string("header.json: ") + e.what());
        }
    }

    if (fs::exists(dir / "scenario.json")) {
        log.scenario_document = csv::read_file(dir / "scenario.json");
        if (sha256_hex(log.scenario_document) != log.header.scenario_sha256)
            result.warnings.push_back("scenario.json does not match header scenario_sha256");
    } else {
        result.warnings.push_back("scenario.json missing from run directory");
    }

    {
        const auto t = load_table(dir, "input.csv");
        log.input = with_columns("input.csv", [&] { return parse_input_table(t); });
    }
    {
        const auto t = load_table(dir, "vehicle.csv");
        with_columns("vehicle.csv", [&] {
            csv::Reader r(t, cols(kVehicleCols));
            log.vehicle.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                auto& row = log.vehicle[i];
                row.t_us = r.get<std::uint64_t>(i, 0);
                auto& v = row.state;
                v.x = r.get<double>(i, 1);
                v.y = r.get<double>(i, 2);
                v.z = r.get<double>(i, 3);
                v.rot_x = r.get<double>(i, 4);
                v.rot_y = r.get<double>(i, 5);
                v.rot_z = r.get<double>(i, 6);
                v.speed = r.get<double>(i, 7);
                r.get<double>(i, 8);  // heading mirrors rot_z
                v.yaw_rate = r.get<double>(i, 9);
                v.t = static_cast<double>(row.t_us) / 1e6;
            }
            return 0;
        });
    }
    {
        const auto t = load_table(dir, "radar.csv");
        with_columns("radar.csv", [&] {
            csv::Reader r(t, cols(kRadarCols));
            log.radar.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                auto& row = log.radar[i];
                row.t_us = r.get<std::uint64_t>(i, 0);
                const auto mount = radar_mount_from_string(r.field(i, 1));
                if (!mount) throw csv::ColumnError("sensor", "radar.csv: bad sensor '" + r.field(i, 1) + "'");
                row.sensor = *mount;
                row.reading = {r.get<int>(i, 2),    r.get<double>(i, 3), r.get<double>(i, 4),
                               r.get<double>(i, 5), r.get<double>(i, 6), r.get<double>(i, 7)};
            }
            return 0;
        });
    }
    {
        const auto t = load_table(dir, "lane.csv");
        with_columns("lane.csv", [&] {
            csv::Reader r(t, cols(kLaneCols));
            log.lane.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                auto& row = log.lane[i];
                row.t_us = r.get<std::uint64_t>(i, 0);
                row.station = r.get<int>(i, 1);
                row.data = {r.get<double>(i, 2), r.get<double>(i, 3), r.get<double>(i, 4),
                            r.get<double>(i, 5), r.get<double>(i, 6)};
            }
            return 0;
        });
    }
    {
        const auto t = load_table(dir, "touch.csv");
        with_columns("touch.csv", [&] {
            csv::Reader r(t, cols(kTouchCols));
            log.touch.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                log.touch[i].t_us = r.get<std::uint64_t>(i, 0);
                for (std::size_t q = 0; q < 4; ++q) log.touch[i].quadrants[q] = parse_bit(r, i, q + 1);
            }
            return 0;
        });
    }
    {
        const auto t = load_table(dir, "phone.csv");
        with_columns("phone.csv", [&] {
            csv::Reader r(t, cols(kPhoneCols));
            log.phone.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                log.phone[i].t_us = r.get<std::uint64_t>(i, 0);
                const auto kind = phone_kind_from_string(r.field(i, 1));
                if (!kind) throw csv::ColumnError("kind", "phone.csv: bad kind '" + r.field(i, 1) + "'");
                log.phone[i].kind = *kind;
                log.phone[i].question = r.field(i, 2);
            }
            return 0;
        });
    }
    {
        const auto t = load_table(dir, "platform.csv");
        with_columns("platform.csv", [&] {
            csv::Reader r(t, cols(kPlatformCols));
            log.platform.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) {
                auto& row = log.platform[i];
                row.t_us = r.get<std::uint64_t>(i, 0);
                row.seq = r.get<std::uint32_t>(i, 1);
                row.pitch = r.get<float>(i, 2);
                row.roll = r.get<float>(i, 3);
                row.yaw = r.get<float>(i, 4);
                row.heave = r.get<float>(i, 5);
                const unsigned flags = r.get<unsigned>(i, 6);
                if (flags > 0x07) throw csv::ColumnError("flags", "platform.csv: bad flags value");
                row.flags = static_cast<std::uint8_t>(flags);
            }
            return 0;
        });
    }
    return result;
}

RunLog read_log(const fs::path& dir) { return read_log_checked(dir).log; }

}  // namespace drivesim
