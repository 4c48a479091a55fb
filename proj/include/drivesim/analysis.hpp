#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "drivesim/sensors.hpp"
#include "drivesim/telemetry.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

/// Sentinel written to lane_indicators.csv for an off-road sample.
inline constexpr int kOffRoad = -1;

struct LaneIndicator {
    std::uint64_t t_us = 0;
    std::optional<int> lane_index;  ///< nullopt = off road
    double center_offset = 0.0;

    bool operator==(const LaneIndicator&) const = default;
};

struct NearestObject {
    int object_id = 0;
    double range = 0.0;
    double azimuth = 0.0;

    bool operator==(const NearestObject&) const = default;
};

struct NearestObjects {
    std::uint64_t t_us = 0;
    std::optional<NearestObject> front;
    std::optional<NearestObject> left;
    std::optional<NearestObject> right;

    const std::optional<NearestObject>& operator[](RadarMount m) const;
    bool operator==(const NearestObjects&) const = default;
};

/// Closest reading per sensor among rows sharing one t_us; range ties go to
/// the smaller object id.
NearestObjects nearest_objects(std::span<const RadarRow> rows_at_tick);

/// Groups the radar table by tick. Ticks with no readings are omitted.
std::vector<NearestObjects> nearest_objects_by_tick(std::span<const RadarRow> radar);

std::vector<LaneIndicator> lane_indicators(const RunLog& log, const Road& road);

struct PlotColors {
    static constexpr const char* black = "#000000";
    static constexpr const char* yellow = "#E6C800";
    static constexpr const char* blue = "#1F4FFF";
    static constexpr const char* light_blue = "#7FB2FF";
    static constexpr const char* red = "#D62728";
    static constexpr const char* grey = "#8C8C8C";
};

class EmptyLogError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plan view of a run as an SVG document: curbs in black, lane lines in
/// yellow, the driven path in blue, the vehicle box at its final pose
/// coloured by lane (even lanes blue, odd lanes light blue), and each
/// detected obstacle at its first detection, coloured by the detecting
/// radar (front red, left blue, right light blue) with the line of
/// detection drawn from the vehicle. Output is byte-deterministic.
std::string render_plot(const RunLog& log, const Scenario& scenario);

struct AnalyzeOptions {
    bool plot_only = false;
    std::optional<std::filesystem::path> out_dir;  ///< defaults to the run dir
};

/// Reads a run directory and writes lane_indicators.csv,
/// nearest_objects.csv and plot.svg. Missing tables are named in the error.
/// Returns read warnings (e.g. a scenario checksum mismatch).
std::vector<std::string> analyze(const std::filesystem::path& run_dir, const AnalyzeOptions& options = {});

}  // namespace drivesim
