#pragma once

// Shared fixtures for the C++ tests.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "drivesim/telemetry.hpp"
#include "drivesim/world.hpp"

namespace drivesim::fixtures {

inline std::filesystem::path fresh_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("drivesim_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Straight road along +x from the origin.
inline nlohmann::json straight_doc(double length = 500.0, int lanes = 2, double width = 3.5) {
    return {{"road",
             {{"segments", {{{"kind", "straight"}, {"length", length}}}},
              {"lane_width", width},
              {"num_lanes", lanes}}},
            {"vehicle_start", {0.0, -0.5 * width * (lanes % 2 == 0 ? 1 : 0), 0.0, 0.0}},
            {"seed", 1}};
}

inline Scenario scenario_of(const nlohmann::json& doc) { return load_scenario(doc.dump()); }

/// A busier scenario used for determinism and round-trip checks: a curve,
/// moving and static obstacles, hand tracks.
inline nlohmann::json busy_doc() {
    return nlohmann::json::parse(R"({
      "road": {
        "segments": [
          {"kind": "straight", "length": 80},
          {"kind": "arc", "length": 120, "curvature": 0.008},
          {"kind": "straight", "length": 60},
          {"kind": "arc", "length": 100, "curvature": -0.01}
        ],
        "lane_width": 3.5,
        "num_lanes": 3,
        "origin": [5, -2, 0.1]
      },
      "obstacles": [
        {"id": 1, "x": 60, "y": 4, "heading": 0.1, "speed": 3},
        {"id": 2, "x": 40, "y": -6},
        {"id": 3, "x": 90, "y": 12, "heading": 3.0, "speed": 1.5}
      ],
      "vehicle_start": [5, -2, 0.1, 12],
      "seed": 20240611,
      "hand_tracks": [
        {"t": 0, "distances": [0, 0, 0.1, 0.1]},
        {"t": 2.5, "distances": [0.01, 0, 0.1, 0]},
        {"t": 6, "distances": [0, 0.3, 0, 0]}
      ]
    })");
}

/// Deterministic pseudo-random driver script covering the clamp range.
inline std::vector<InputRow> wavy_script(std::uint64_t ticks, std::uint64_t seed = 5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<InputRow> rows;
    double steer = 0.0;
    for (std::uint64_t i = 0; i < ticks; ++i) {
        if (i % 40 == 0) steer = 0.3 * u(rng);
        const double phase = static_cast<double>(i) * 0.003;
        rows.push_back({(i + 1) * kTickUs,
                        {steer, 0.5 + 0.5 * std::sin(phase), std::max(0.0, -std::sin(phase))}});
    }
    return rows;
}

}  // namespace drivesim::fixtures
