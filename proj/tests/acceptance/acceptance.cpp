// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass --write-golden to refreeze the plot fixture.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "drivesim/analysis.hpp"
#include "drivesim/codec.hpp"
#include "drivesim/endpoint.hpp"
#include "drivesim/platform.hpp"
#include "drivesim/sensors.hpp"
#include "drivesim/telemetry.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace drivesim;
using namespace drivesim::fixtures;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// ---- 1: longitudinal tuning ------------------------------------------------

void longitudinal(Verdict& v) {
    constexpr double kTol = 0.005;
    auto doc = straight_doc(800.0);
    const auto sc = scenario_of(doc);

    auto t0 = Clock::now();
    LoopConfig cfg;
    cfg.duration = 13.0;
    ConstantInput throttle({0.0, 1.0, 0.0});
    const auto up = run(sc, doc.dump(), cfg, throttle);
    const double wall_up = seconds_since(t0);
    double t_reach = NAN;
    for (const auto& r : up.vehicle)
        if (r.state.speed >= kSixtyMph - 1e-9) {
            t_reach = static_cast<double>(r.t_us) / 1e6;
            break;
        }

    doc["vehicle_start"] = {0, -1.75, 0, kSixtyMph};
    const auto sc2 = scenario_of(doc);
    t0 = Clock::now();
    cfg.duration = 5.0;
    ConstantInput brake({0.0, 0.0, 1.0});
    const auto down = run(sc2, doc.dump(), cfg, brake);
    const double wall_down = seconds_since(t0);
    double t_stop = NAN;
    for (const auto& r : down.vehicle)
        if (r.state.speed == 0.0) {
            t_stop = static_cast<double>(r.t_us) / 1e6;
            break;
        }

    v.detail << "0->26.8224 m/s at t=" << t_reach << " s; 26.8224->0 at t=" << t_stop
             << " s; wall " << wall_up << " s / " << wall_down << " s";
    v.require(std::abs(t_reach - 12.0) <= kTol + 1e-9, "throttle time");
    v.require(std::abs(t_stop - 4.0) <= kTol + 1e-9, "brake time");
    v.require(wall_up < 1.0 && wall_down < 1.0, "runtime");
}

// ---- 2 and 3: loop rate and touch cadence ----------------------------------

struct TenSecondRun {
    RunLog log;
    EndpointReport report;
    std::vector<std::uint32_t> seqs;
};

TenSecondRun ten_second_run() {
    const auto doc = busy_doc();
    LoopConfig cfg;
    cfg.duration = 10.0;
    TableInput in(wavy_script(cfg.tick_count()));
    TenSecondRun out;
    PlatformEndpoint ep;
    RunHooks hooks;
    hooks.platform = [&](std::span<const std::uint8_t> b) {
        ep.ingest(b);
        if (auto d = decode_command(b); auto* c = std::get_if<PlatformCommand>(&d)) out.seqs.push_back(c->seq);
    };
    out.log = run(scenario_of(doc), doc.dump(), cfg, in, hooks);
    out.report = ep.report();
    return out;
}

void loop_rate(const TenSecondRun& r, Verdict& v) {
    bool in_order = r.seqs.size() == 2000;
    for (std::size_t i = 0; in_order && i < r.seqs.size(); ++i) in_order = r.seqs[i] == i;
    v.detail << r.report.received << " packets, gaps " << r.report.gaps << ", crc errors "
             << r.report.crc_errors << ", seq 0.." << (r.seqs.empty() ? 0 : r.seqs.back());
    v.require(r.report.received == 2000, "packet count");
    v.require(in_order, "seq 0..1999");
    v.require(r.report.gaps == 0 && r.report.crc_errors == 0 && r.report.malformed == 0, "stream health");
    v.require(r.log.platform.size() == 2000, "platform table");
}

void touch_cadence(const TenSecondRun& r, Verdict& v) {
    bool grid = true;
    for (std::size_t i = 0; i < r.log.touch.size(); ++i)
        grid = grid && r.log.touch[i].t_us == (i + 1) * kTouchPeriodUs;
    v.detail << r.log.touch.size() << " touch samples, on 10 ms grid: " << (grid ? "yes" : "no");
    v.require(r.log.touch.size() == 1000, "sample count");
    v.require(grid, "grid");
}

// ---- 4: ring timing ---------------------------------------------------------

void ring_timing(Verdict& v) {
    PhoneSource src(20240611);
    std::vector<PhoneEvent> events;
    std::vector<std::uint64_t> rings;
    for (std::uint64_t t = 1'000'000; rings.size() < 1001; t += 1'000'000) {
        for (auto& e : src.poll(t)) {
            if (e.kind == PhoneEventKind::Ring) rings.push_back(e.t_us);
            events.push_back(std::move(e));
        }
    }
    std::vector<double> gaps;
    for (std::size_t i = 1; i <= 1000; ++i) gaps.push_back(static_cast<double>(rings[i] - rings[i - 1]) / 1e6);
    const auto [mn, mx] = std::minmax_element(gaps.begin(), gaps.end());
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(gaps.size());
    const auto violation = find_order_violation(events);
    v.detail << "1000 gaps: min " << *mn << " s, max " << *mx << " s, mean " << mean << " s; "
             << events.size() << " events ordered: " << (violation ? "no" : "yes");
    v.require(*mn >= 30.0 && *mx <= 60.0, "gap range");
    v.require(mean >= 43.5 && mean <= 46.5, "gap mean");
    v.require(!violation, "episode ordering");
}

// ---- 5: radar oracle --------------------------------------------------------

void radar_oracle(Verdict& v) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(-160.0, 160.0);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> fov(0.05, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> range(1.0, 200.0);
    std::uniform_int_distribution<int> count(0, 40);
    const auto t0 = Clock::now();
    int mismatches = 0;
    double worst = 0.0;
    std::size_t readings = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        VehicleState veh{};
        veh.x = pos(rng);
        veh.y = pos(rng);
        veh.rot_z = ang(rng);
        const RadarConfig cfg{static_cast<RadarMount>(inst % 3), ang(rng), fov(rng), range(rng)};
        std::vector<Obstacle> obs;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) obs.push_back({i, pos(rng), pos(rng), ang(rng), range(rng) / 10});
        const auto got = radar_scan(cfg, veh, obs);
        const auto want = oracle::radar(cfg, veh.x, veh.y, veh.rot_z, obs);
        if (got.size() != want.size()) {
            ++mismatches;
            continue;
        }
        readings += got.size();
        for (std::size_t i = 0; i < got.size(); ++i) {
            const double d = std::max({std::abs(got[i].range - want[i].range),
                                       std::abs(got[i].azimuth - want[i].azimuth),
                                       std::abs(got[i].elevation - want[i].elevation),
                                       std::abs(got[i].object_speed - want[i].object_speed),
                                       std::abs(got[i].object_heading - want[i].object_heading)});
            worst = std::max(worst, d);
            if (got[i].object_id != want[i].object_id || d > 1e-9) ++mismatches;
        }
    }
    const double wall = seconds_since(t0);
    v.detail << "1000 instances, " << readings << " readings, worst field error " << worst
             << ", mismatches " << mismatches << ", " << wall << " s";
    v.require(mismatches == 0, "oracle agreement");
    v.require(wall < 5.0, "runtime");
}

// ---- 6: lane geometry -------------------------------------------------------

void lane_geometry(Verdict& v) {
    constexpr std::array<double, 3> preview{10.0, 20.0, 30.0};
    double curv_err = 0.0, sum_err = 0.0;
    int scans = 0;
    for (double kappa : {0.0, 1.0 / 250.0, -1.0 / 125.0}) {
        const Road road({kappa == 0.0 ? RoadSegment::straight(400) : RoadSegment::arc(400, kappa)}, 3.5, 3,
                        {});
        for (int i = 0; i <= 300; ++i) {
            const auto f = road.frame_at(i * 1.2);
            for (int lane = 0; lane < 3; ++lane) {
                for (double d : {-1.5, 0.0, 1.2}) {
                    const double o = road.lane_center(lane) + d;
                    VehicleState veh{};
                    veh.x = f.center.x - o * std::sin(f.center.heading);
                    veh.y = f.center.y + o * std::cos(f.center.heading);
                    veh.rot_z = f.center.heading;
                    const auto r = lane_scan(road, veh, preview);
                    ++scans;
                    for (const auto& s : r.stations) {
                        curv_err = std::max(curv_err, std::abs(s.curvature - kappa));
                        sum_err = std::max(sum_err, std::abs(s.left_marker + s.right_marker - 3.5));
                    }
                }
            }
        }
    }
    v.detail << scans << " scans x 4 stations: curvature error " << curv_err << ", marker sum error "
             << sum_err;
    v.require(curv_err <= 1e-12, "curvature");
    v.require(sum_err <= 1e-9, "marker sum");
}

// ---- 7: interlocks ----------------------------------------------------------

void interlocks(Verdict& v) {
    VehicleState veh{};
    veh.rot_x = 0.05;
    veh.rot_y = -0.04;
    veh.rot_z = 0.3;
    int enabled = 0, neutral_ok = 0;
    for (int bits = 0; bits < 16; ++bits) {
        const SafetyState s{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0};
        const auto c = cue(veh, {}, {}, s, 0);
        const bool all_ok = bits == 0b0011;
        if (c.flags.motion_enabled) ++enabled;
        if (c.flags.motion_enabled != all_ok) continue;
        if (c.flags.estop != s.estop()) continue;
        if (!all_ok && (c.pitch != 0.0f || c.roll != 0.0f || c.yaw != 0.0f || c.heave != 0.0f)) continue;
        ++neutral_ok;
    }

    PlatformEndpoint ep;
    PlatformCommand c;
    c.flags.motion_enabled = true;
    c.pitch = 0.1f;
    ep.apply(c);
    c.seq = 1;
    c.flags = {false, true, false};
    ep.apply(c);
    bool held = ep.report().estopped;
    for (std::uint32_t s = 2; s < 100; ++s) {
        c.seq = s;
        c.flags = {false, false, false};
        ep.apply(c);
        held = held && ep.report().estopped && ep.report().attitude == std::array<float, 4>{};
    }
    c.seq = 100;
    c.flags = {false, false, true};
    ep.apply(c);
    const bool cleared = !ep.report().estopped && ep.report().attitude[0] == 0.1f;

    v.detail << "16 states: motion_enabled in " << enabled << ", table correct in " << neutral_ok
             << "; latch held without clear: " << (held ? "yes" : "no")
             << ", cleared by estop-clear+enabled: " << (cleared ? "yes" : "no");
    v.require(enabled == 1 && neutral_ok == 16, "state table");
    v.require(held && cleared, "latch");
}

// ---- 8: codec ---------------------------------------------------------------

void codec(Verdict& v) {
    // seq 1, t_us 5000, motion_enabled, zero axes; CRC computed with zlib.
    const Bytes golden{0x46, 0x44, 0x30, 0x31, 0x01, 0x04, 0x01, 0x00, 0x00, 0x00, 0x88, 0x13, 0x00,
                       0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                       0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x6e, 0x6d, 0xc6, 0x44};
    PlatformCommand g;
    g.seq = 1;
    g.t_us = 5000;
    g.flags.motion_enabled = true;
    const bool golden_ok = encode_command(g) == golden;

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<float> axis(-1.0f, 1.0f);
    int roundtrip_fail = 0;
    for (int i = 0; i < 10'000; ++i) {
        PlatformCommand c;
        c.seq = static_cast<std::uint32_t>(rng());
        c.t_us = rng();
        c.pitch = axis(rng);
        c.roll = axis(rng);
        c.yaw = axis(rng) * 100.0f;
        c.heave = axis(rng) * 0.1f;
        c.flags = CommandFlags::from_bits(static_cast<std::uint8_t>(rng() & 0x07));
        const auto d = decode_command(encode_command(c));
        const auto* back = std::get_if<PlatformCommand>(&d);
        if (!back || !(*back == c)) ++roundtrip_fail;
    }

    int accepted = 0;
    for (std::size_t byte = 0; byte < golden.size(); ++byte)
        for (int bit = 0; bit < 8; ++bit) {
            Bytes b = golden;
            b[byte] ^= static_cast<std::uint8_t>(1u << bit);
            if (std::holds_alternative<PlatformCommand>(decode_command(b))) ++accepted;
        }

    v.detail << "golden match: " << (golden_ok ? "yes" : "no") << "; 10000 round trips, failures "
             << roundtrip_fail << "; 304 bit flips, accepted " << accepted;
    v.require(golden_ok, "golden");
    v.require(roundtrip_fail == 0, "round trip");
    v.require(accepted == 0, "bit flips");
}

// ---- 9: determinism ---------------------------------------------------------

void determinism(Verdict& v) {
    const auto doc = busy_doc();
    const auto sc = scenario_of(doc);
    LoopConfig cfg;
    cfg.duration = 20.0;
    const auto script = wavy_script(cfg.tick_count(), 3);

    const auto run_to = [&](const std::string& name) {
        TableInput in(script);
        const auto log = run(sc, doc.dump(), cfg, in);
        const auto dir = fresh_dir(name);
        write_log(log, dir);
        return std::pair{log, dir};
    };
    const auto [a, dir_a] = run_to("accept_a");
    const auto [b, dir_b] = run_to("accept_b");
    int files = 0, differing = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir_a)) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        if (sha256_hex(slurp(entry.path())) != sha256_hex(slurp(dir_b / entry.path().filename()))) ++differing;
    }

    const auto loaded = read_log(dir_a);
    auto src = replay(loaded);
    const auto again = run(load_scenario(loaded.scenario_document), loaded.scenario_document, cfg, *src);
    const bool vehicle_equal = again.vehicle == a.vehicle;

    v.detail << files << " CSV files, SHA-256 differing " << differing
             << "; replayed vehicle table identical: " << (vehicle_equal ? "yes" : "no") << " ("
             << again.vehicle.size() << " rows)";
    v.require(files == 7 && differing == 0, "csv hashes");
    v.require(vehicle_equal, "replay");
}

// ---- 10: touch calibration --------------------------------------------------

void touch_calibration(Verdict& v) {
    int non_monotone = 0;
    for (int r : kCalibrationResistors) {
        TouchCalibration cal;
        cal.resistor_ohms = r;
        double prev = touch_response(0.0, cal);
        for (int i = 1; i <= 20'000; ++i) {
            const double c = touch_response(i * 2.5e-5, cal);
            if (c > prev) ++non_monotone;
            prev = c;
        }
    }
    TouchCalibration prod;
    std::set<double> values;
    bool contact_only = touch_response(0.0, prod) > 0.0;
    for (int i = 1; i <= 20'000; ++i) {
        const double c = touch_response(i * 2.5e-5, prod);
        values.insert(c);
        contact_only = contact_only && c == 0.0;
    }
    values.insert(touch_response(0.0, prod));
    v.detail << "5 resistors, monotonicity violations " << non_monotone << "; 13 kOhm distinct values "
             << values.size() << ", nonzero only at contact: " << (contact_only ? "yes" : "no");
    v.require(non_monotone == 0, "monotone");
    v.require(values.size() == 2 && contact_only, "13 kOhm two-valued");
}

// ---- 11: golden plot --------------------------------------------------------

std::string golden_plot() {
    const auto path = std::filesystem::path(DRIVESIM_TEST_DATA) / "plot_scenario.json";
    const std::string text = slurp(path);
    LoopConfig cfg;
    cfg.duration = 8.0;
    ConstantInput in({0.0, 0.1, 0.0});
    const auto sc = load_scenario(text);
    return render_plot(run(sc, text, cfg, in), sc);
}

std::size_t occurrences(const std::string& s, const std::string& pattern) {
    const std::regex re(pattern);
    return static_cast<std::size_t>(
        std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
}

void plot(Verdict& v) {
    const auto svg = golden_plot();
    const auto frozen = slurp(std::filesystem::path(DRIVESIM_TEST_DATA) / "golden_plot.svg");
    const bool identical = !frozen.empty() && svg == frozen;
    const std::size_t curbs = occurrences(svg, R"(<path class="curb"[^>]*stroke="#000000")");
    const std::size_t lanes = occurrences(svg, R"(<path class="lane-line"[^>]*stroke="#E6C800"[^>]*stroke-dasharray)");
    const std::size_t path = occurrences(svg, R"(<polyline class="path"[^>]*stroke="#1F4FFF")");
    const std::size_t front = occurrences(svg, R"(<circle class="obstacle front"[^>]*fill="#D62728")");
    const std::size_t left = occurrences(svg, R"(<circle class="obstacle left"[^>]*fill="#1F4FFF")");
    const std::size_t right = occurrences(svg, R"(<circle class="obstacle right"[^>]*fill="#7FB2FF")");
    const std::size_t rays = occurrences(svg, R"re(<line class="ray (front|left|right)")re");
    v.detail << "byte-identical: " << (identical ? "yes" : "no") << " (sha256 " << sha256_hex(svg).substr(0, 12)
             << "); curbs " << curbs << ", lane lines " << lanes << ", path " << path << ", obstacles f/l/r "
             << front << "/" << left << "/" << right << ", rays " << rays;
    v.require(identical, "golden bytes");
    v.require(curbs >= 2 && lanes >= 1 && path == 1, "road and path");
    v.require(front >= 1 && left >= 1 && right >= 1 && rays == front + left + right, "detections");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc == 2 && std::strcmp(argv[1], "--write-golden") == 0) {
        spit(std::filesystem::path(DRIVESIM_TEST_DATA) / "golden_plot.svg", golden_plot());
        std::cout << "wrote golden_plot.svg\n";
        return 0;
    }

    const auto ten = ten_second_run();
    const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
        {"longitudinal tuning", longitudinal},
        {"loop rate", [&](Verdict& v) { loop_rate(ten, v); }},
        {"touch cadence", [&](Verdict& v) { touch_cadence(ten, v); }},
        {"ring timing", ring_timing},
        {"radar oracle", radar_oracle},
        {"lane geometry", lane_geometry},
        {"interlocks", interlocks},
        {"codec", codec},
        {"determinism", determinism},
        {"touch calibration", touch_calibration},
        {"plot", plot},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << " [exception: " << e.what() << "]";
        }
        if (!v.pass) ++failed;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
                  << v.detail.str() << "\n";
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
