#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drivesim/driver_monitor.hpp"
#include "drivesim/endpoint.hpp"
#include "drivesim/platform.hpp"
#include "drivesim/sensors.hpp"
#include "drivesim/vehicle.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

inline constexpr double kTick = 0.005;
inline constexpr std::uint64_t kTickUs = 5000;
inline constexpr int kTouchEveryTicks = 2;
inline constexpr int kSnapshotEveryTicks = 10;
inline constexpr const char* kVersion = "drivesim 1.0.0";

struct LoopConfig {
    double tick = kTick;
    double duration = 10.0;
    bool realtime = false;
    std::optional<std::uint64_t> seed;  ///< overrides the scenario seed when set

    /// Throws std::invalid_argument unless tick == 0.005 and duration > 0
    /// and duration is a whole number of ticks.
    std::uint64_t tick_count() const;
};

// ---- log records -----------------------------------------------------------

struct InputRow {
    std::uint64_t t_us = 0;
    DriverInput input;
    bool operator==(const InputRow&) const = default;
};

struct VehicleRow {
    std::uint64_t t_us = 0;
    VehicleState state;  ///< heading column mirrors rot_z
    bool operator==(const VehicleRow&) const = default;
};

struct RadarRow {
    std::uint64_t t_us = 0;
    RadarMount sensor = RadarMount::Front;
    RadarReading reading;
    bool operator==(const RadarRow&) const = default;
};

struct LaneRow {
    std::uint64_t t_us = 0;
    int station = 0;
    LaneStation data;  ///< NaN fields when the vehicle left the catchment
    bool operator==(const LaneRow& o) const;
};

struct PlatformRow {
    std::uint64_t t_us = 0;
    std::uint32_t seq = 0;
    float pitch = 0.0f;
    float roll = 0.0f;
    float yaw = 0.0f;
    float heave = 0.0f;
    std::uint8_t flags = 0;
    bool operator==(const PlatformRow&) const = default;
};

struct LogHeader {
    std::string scenario_sha256;
    std::uint64_t seed = 0;
    double tick = kTick;
    std::string version = kVersion;
    bool operator==(const LogHeader&) const = default;
};

struct RunLog {
    LogHeader header;
    std::string scenario_document;  ///< stored alongside the tables as scenario.json
    std::vector<InputRow> input;
    std::vector<VehicleRow> vehicle;
    std::vector<RadarRow> radar;
    std::vector<LaneRow> lane;
    std::vector<TouchSample> touch;
    std::vector<PhoneEvent> phone;
    std::vector<PlatformRow> platform;

    bool operator==(const RunLog&) const = default;
};

std::string sha256_hex(std::string_view data);

// ---- input sources ---------------------------------------------------------

/// Per-tick inputs consumed by the loop.
struct TickInput {
    DriverInput driver;
    SafetyState safety;
    std::vector<PhoneEventKind> phone_acks;
};

class InputExhausted : public std::runtime_error {
public:
    explicit InputExhausted(std::uint64_t tick);
    std::uint64_t tick() const noexcept { return tick_; }

private:
    std::uint64_t tick_;
};

class InputSource {
public:
    virtual ~InputSource() = default;
    /// Input for tick `index` whose records carry `t_us`; nullopt when the
    /// source is exhausted.
    virtual std::optional<TickInput> next(std::uint64_t index, std::uint64_t t_us) = 0;
    /// Phone follow-ups come from acknowledgements rather than a script.
    virtual bool interactive_phone() const { return false; }
    /// Number of inputs that had to be clamped on ingestion.
    virtual std::uint64_t clamped_count() const { return 0; }
};

/// Replays a per-tick input table (the input.csv layout). Row i must carry
/// the t_us of tick i. Out-of-range values are re-clamped and counted.
class TableInput : public InputSource {
public:
    explicit TableInput(std::vector<InputRow> rows, SafetyState safety = {});
    std::optional<TickInput> next(std::uint64_t index, std::uint64_t t_us) override;
    std::uint64_t clamped_count() const override { return clamped_; }

private:
    std::vector<InputRow> rows_;
    SafetyState safety_;
    std::uint64_t clamped_ = 0;
};

/// Same input for every tick.
class ConstantInput : public InputSource {
public:
    explicit ConstantInput(DriverInput input, SafetyState safety = {});
    std::optional<TickInput> next(std::uint64_t index, std::uint64_t t_us) override;

private:
    TickInput value_;
};

/// Reads an input script in the input.csv layout.
std::unique_ptr<InputSource> load_input_script(const std::filesystem::path& path);

/// An input source that reproduces a logged input table tick-exactly.
std::unique_ptr<InputSource> replay(const RunLog& log);

// ---- the loop --------------------------------------------------------------

/// Receives each encoded platform command (UDP socket, in-process endpoint).
using CommandSink = std::function<void(std::span<const std::uint8_t>)>;
using TouchSink = std::function<void(const TouchSample&)>;
using PhoneSink = std::function<void(const PhoneEvent&)>;

/// Everything observable about one completed tick.
struct TickFrame {
    std::uint64_t index = 0;
    std::uint64_t t_us = 0;
    DriverInput input;
    VehicleState vehicle;
    SafetyState safety;
    bool shake_active = false;
    PlatformCommand command;
    std::array<std::vector<RadarReading>, 3> radar;
    std::optional<double> lane_offset;  ///< nullopt outside the catchment
    std::optional<int> lane;
    std::optional<TouchSample> touch;    ///< on touch ticks only
    std::vector<PhoneEvent> phone;       ///< emitted this tick
    std::optional<PhoneEventKind> last_phone_kind;
    std::string pending_question;
    std::vector<Obstacle> obstacles;
    std::optional<CollisionEvent> collision;
};

struct RunHooks {
    CommandSink platform;
    TouchSink touch;
    PhoneSink phone;
    std::function<void(const TickFrame&)> on_tick;
    /// Polled once per tick; returning true ends the run early.
    std::function<bool()> stop_requested;
};

/// The 200 Hz loop state. Each advance() performs one tick: vehicle step,
/// collision shake, cueing, command emission, radar and lane scans, touch
/// sampling on even ticks, and due phone events, and appends every record
/// to the log. Records of tick i carry t_us = (i + 1) * 5000.
class Simulation {
public:
    Simulation(Scenario scenario, std::string scenario_document, LoopConfig config,
               bool interactive_phone = false);

    const TickFrame& advance(const TickInput& in, const RunHooks& hooks = {});

    const RunLog& log() const noexcept { return log_; }
    RunLog take_log() { return std::move(log_); }
    std::uint64_t ticks_done() const noexcept { return index_; }
    const Scenario& scenario() const noexcept { return scenario_; }

private:
    Scenario scenario_;
    LoopConfig config_;
    std::array<RadarConfig, 3> radars_;
    TouchCalibration touch_cal_;
    VehicleState vehicle_;
    std::vector<Obstacle> obstacles_;
    CollisionDetector collisions_;
    ShakeState shake_;
    PhoneSource phone_;
    std::uint64_t index_ = 0;
    std::optional<PhoneEventKind> last_phone_kind_;
    TickFrame frame_;
    RunLog log_;
};

/// Runs for config.duration. Throws InputExhausted if the source runs dry.
RunLog run(const Scenario& scenario, const std::string& scenario_document,
           const LoopConfig& config, InputSource& driver, const RunHooks& hooks = {});

// ---- persistence -----------------------------------------------------------

class LogFormatError : public std::runtime_error {
public:
    LogFormatError(std::string file, std::string column, const std::string& what)
        : std::runtime_error(what), file_(std::move(file)), column_(std::move(column)) {}
    const std::string& file() const noexcept { return file_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::string file_;
    std::string column_;
};

/// Writes header.json, scenario.json and one CSV per table into dir.
/// Overwrites existing files. I/O failures throw std::runtime_error naming
/// the path.
void write_log(const RunLog& log, const std::filesystem::path& dir);

struct ReadLogResult {
    RunLog log;
    std::vector<std::string> warnings;
};

/// Inverse of write_log. Schema mismatches throw LogFormatError naming the
/// column; a scenario checksum mismatch is reported as a warning.
ReadLogResult read_log_checked(const std::filesystem::path& dir);
RunLog read_log(const std::filesystem::path& dir);

/// Serialized CSV text of each table, keyed by file name.
std::vector<std::pair<std::string, std::string>> serialize_tables(const RunLog& log);

}  // namespace drivesim
