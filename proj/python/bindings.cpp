// Python bindings for the drivesim core.

#include <fstream>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "drivesim/analysis.hpp"
#include "drivesim/codec.hpp"
#include "drivesim/driver_monitor.hpp"
#include "drivesim/endpoint.hpp"
#include "drivesim/platform.hpp"
#include "drivesim/sensors.hpp"
#include "drivesim/telemetry.hpp"
#include "drivesim/vehicle.hpp"
#include "drivesim/world.hpp"

namespace py = pybind11;
using namespace drivesim;

namespace {

py::bytes to_bytes(const Bytes& b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

Bytes from_bytes(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

// Parsed scenario plus its source text (needed for the log header).
struct PyScenario {
    std::string text;
    Scenario scenario;
};

PyScenario scenario_from_text(std::string text) {
    Scenario sc = load_scenario(text);
    return {std::move(text), std::move(sc)};
}

RunLog simulate(const PyScenario& sc, double duration, std::optional<std::vector<DriverInput>> inputs,
                std::optional<std::uint64_t> seed, SafetyState safety) {
    LoopConfig cfg;
    cfg.duration = duration;
    cfg.seed = seed;
    std::unique_ptr<InputSource> src;
    if (inputs) {
        std::vector<InputRow> rows;
        for (std::size_t i = 0; i < inputs->size(); ++i) rows.push_back({(i + 1) * kTickUs, (*inputs)[i]});
        src = std::make_unique<TableInput>(std::move(rows), safety);
    } else {
        src = std::make_unique<ConstantInput>(DriverInput{}, safety);
    }
    py::gil_scoped_release release;
    return run(sc.scenario, sc.text, cfg, *src);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deterministic 200 Hz driving-simulator core";
    m.attr("TICK") = kTick;
    m.attr("TICK_US") = kTickUs;
    m.attr("SIXTY_MPH") = kSixtyMph;
    m.attr("VERSION") = kVersion;

    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception<LogFormatError>(m, "LogFormatError", PyExc_ValueError);
    py::register_exception<InputExhausted>(m, "InputExhausted", PyExc_RuntimeError);
    py::register_exception<RoadRangeError>(m, "RoadRangeError", PyExc_ValueError);
    py::register_exception<OffRoadError>(m, "OffRoadError", PyExc_ValueError);
    py::register_exception<EmptyLogError>(m, "EmptyLogError", PyExc_ValueError);

    py::class_<DriverInput>(m, "DriverInput")
        .def(py::init([](double steering, double throttle, double brake) {
                 return DriverInput{steering, throttle, brake};
             }),
             py::arg("steering") = 0.0, py::arg("throttle") = 0.0, py::arg("brake") = 0.0)
        .def_readwrite("steering", &DriverInput::steering)
        .def_readwrite("throttle", &DriverInput::throttle)
        .def_readwrite("brake", &DriverInput::brake)
        .def("clamped", &DriverInput::clamped)
        .def("__eq__", [](const DriverInput& a, const DriverInput& b) { return a == b; })
        .def("__repr__", [](const DriverInput& d) {
            return "DriverInput(steering=" + std::to_string(d.steering) + ", throttle=" +
                   std::to_string(d.throttle) + ", brake=" + std::to_string(d.brake) + ")";
        });

    py::class_<VehicleState>(m, "VehicleState")
        .def(py::init<>())
        .def_readwrite("t", &VehicleState::t)
        .def_readwrite("x", &VehicleState::x)
        .def_readwrite("y", &VehicleState::y)
        .def_readwrite("rot_x", &VehicleState::rot_x)
        .def_readwrite("rot_y", &VehicleState::rot_y)
        .def_readwrite("rot_z", &VehicleState::rot_z)
        .def_readwrite("speed", &VehicleState::speed)
        .def_readwrite("yaw_rate", &VehicleState::yaw_rate);

    m.def("integrate", [](const VehicleState& s, const DriverInput& in, double dt) {
        return integrate(s, in, VehicleParams{}, dt);
    }, py::arg("state"), py::arg("input"), py::arg("dt") = kTick);

    py::class_<SafetyState>(m, "SafetyState")
        .def(py::init([](bool gate, bool belt, bool estop_local, bool estop_remote) {
                 return SafetyState{gate, belt, estop_local, estop_remote};
             }),
             py::arg("gate_closed") = true, py::arg("seatbelt_on") = true, py::arg("estop_local") = false,
             py::arg("estop_remote") = false)
        .def_readwrite("gate_closed", &SafetyState::gate_closed)
        .def_readwrite("seatbelt_on", &SafetyState::seatbelt_on)
        .def_readwrite("estop_local", &SafetyState::estop_local)
        .def_readwrite("estop_remote", &SafetyState::estop_remote)
        .def_property_readonly("motion_permitted", &SafetyState::motion_permitted);

    py::class_<PlatformCommand>(m, "PlatformCommand")
        .def(py::init<>())
        .def_readwrite("seq", &PlatformCommand::seq)
        .def_readwrite("t_us", &PlatformCommand::t_us)
        .def_readwrite("pitch", &PlatformCommand::pitch)
        .def_readwrite("roll", &PlatformCommand::roll)
        .def_readwrite("yaw", &PlatformCommand::yaw)
        .def_readwrite("heave", &PlatformCommand::heave)
        .def_property(
            "flags", [](const PlatformCommand& c) { return c.flags.bits(); },
            [](PlatformCommand& c, std::uint8_t b) { c.flags = CommandFlags::from_bits(b); })
        .def_property_readonly("estop", [](const PlatformCommand& c) { return c.flags.estop; })
        .def_property_readonly("motion_enabled", [](const PlatformCommand& c) { return c.flags.motion_enabled; })
        .def_property_readonly("shake_active", [](const PlatformCommand& c) { return c.flags.shake_active; })
        .def("__eq__", [](const PlatformCommand& a, const PlatformCommand& b) { return a == b; });

    m.def("cue", [](const VehicleState& v, const SafetyState& safety, std::uint32_t seq) {
        return cue(v, CueingGains{}, ShakeState{}, safety, seq);
    }, py::arg("state"), py::arg("safety") = SafetyState{}, py::arg("seq") = 0);

    m.def("encode_command", [](const PlatformCommand& c) { return to_bytes(encode_command(c)); });
    m.def("decode_command", [](const py::bytes& b) {
        const auto d = decode_command(from_bytes(b));
        if (auto* e = std::get_if<DecodeError>(&d)) throw py::value_error(to_string(*e));
        return std::get<PlatformCommand>(d);
    });
    m.def("crc32", [](const py::bytes& b) { return crc32(from_bytes(b)); });

    py::class_<PlatformEndpoint>(m, "PlatformEndpoint")
        .def(py::init<>())
        .def("ingest", [](PlatformEndpoint& ep, const py::bytes& b) -> std::optional<std::string> {
            const auto err = ep.ingest(from_bytes(b));
            if (err) return std::string(to_string(*err));
            return std::nullopt;
        })
        .def("report", [](const PlatformEndpoint& ep) { return ep.report().to_json(); });

    py::enum_<RadarMount>(m, "RadarMount")
        .value("FRONT", RadarMount::Front)
        .value("LEFT", RadarMount::Left)
        .value("RIGHT", RadarMount::Right);

    py::class_<RadarConfig>(m, "RadarConfig")
        .def(py::init([](RadarMount mount, double boresight, double fov, double max_range) {
                 return RadarConfig{mount, boresight, fov, max_range};
             }),
             py::arg("mount"), py::arg("boresight"), py::arg("fov"), py::arg("max_range"))
        .def_static("front", &RadarConfig::front)
        .def_static("left", &RadarConfig::left)
        .def_static("right", &RadarConfig::right)
        .def_readonly("mount", &RadarConfig::mount)
        .def_readonly("boresight", &RadarConfig::boresight)
        .def_readonly("fov", &RadarConfig::fov)
        .def_readonly("max_range", &RadarConfig::max_range);

    py::class_<Obstacle>(m, "Obstacle")
        .def(py::init([](int id, double x, double y, double heading, double speed) {
                 return Obstacle{id, x, y, heading, speed};
             }),
             py::arg("id"), py::arg("x"), py::arg("y"), py::arg("heading") = 0.0, py::arg("speed") = 0.0)
        .def_readwrite("id", &Obstacle::id)
        .def_readwrite("x", &Obstacle::x)
        .def_readwrite("y", &Obstacle::y)
        .def_readwrite("heading", &Obstacle::heading)
        .def_readwrite("speed", &Obstacle::speed);

    py::class_<RadarReading>(m, "RadarReading")
        .def_readonly("object_id", &RadarReading::object_id)
        .def_readonly("azimuth", &RadarReading::azimuth)
        .def_readonly("elevation", &RadarReading::elevation)
        .def_readonly("range", &RadarReading::range)
        .def_readonly("object_speed", &RadarReading::object_speed)
        .def_readonly("object_heading", &RadarReading::object_heading);

    m.def("radar_scan", [](const RadarConfig& cfg, const VehicleState& v, const std::vector<Obstacle>& obs) {
        return radar_scan(cfg, v, obs);
    });

    m.def("touch_response", [](double distance, int resistor_ohms) {
        TouchCalibration cal;
        cal.resistor_ohms = resistor_ohms;
        cal.validate();
        return touch_response(distance, cal);
    }, py::arg("distance"), py::arg("resistor_ohms") = kProductionResistor);
    m.attr("CALIBRATION_RESISTORS") = std::vector<int>(kCalibrationResistors.begin(), kCalibrationResistors.end());

    py::class_<PhoneEvent>(m, "PhoneEvent")
        .def_readonly("t_us", &PhoneEvent::t_us)
        .def_property_readonly("kind", [](const PhoneEvent& e) { return std::string(to_string(e.kind)); })
        .def_readonly("question", &PhoneEvent::question);

    py::class_<PhoneSource>(m, "PhoneSource")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("poll", &PhoneSource::poll, py::arg("now_us"))
        .def("draw_ring_gap_us", &PhoneSource::draw_ring_gap_us);

    py::class_<PyScenario>(m, "Scenario")
        .def_static("from_text", &scenario_from_text, py::arg("text"))
        .def_static("from_file", [](const std::filesystem::path& p) {
            std::ifstream in(p, std::ios::binary);
            if (!in) throw py::value_error("cannot open " + p.string());
            std::ostringstream ss;
            ss << in.rdbuf();
            return scenario_from_text(ss.str());
        })
        .def_property_readonly("text", [](const PyScenario& s) { return s.text; })
        .def_property_readonly("seed", [](const PyScenario& s) { return s.scenario.seed; })
        .def_property_readonly("lane_width", [](const PyScenario& s) { return s.scenario.road.lane_width(); })
        .def_property_readonly("num_lanes", [](const PyScenario& s) { return s.scenario.road.num_lanes(); })
        .def_property_readonly("road_length", [](const PyScenario& s) { return s.scenario.road.total_length(); })
        .def_property_readonly("obstacles", [](const PyScenario& s) { return s.scenario.obstacles; })
        .def("frame_at", [](const PyScenario& s, double arc) {
            const auto f = s.scenario.road.frame_at(arc);
            return py::make_tuple(f.center.x, f.center.y, f.center.heading, f.curvature);
        }, py::arg("s"))
        .def("lane_index", [](const PyScenario& s, double x, double y) {
            return lane_index(s.scenario.road.nearest(x, y).offset, s.scenario.road);
        }, py::arg("x"), py::arg("y"));

    py::class_<RunLog>(m, "RunLog")
        .def_property_readonly("ticks", [](const RunLog& l) { return l.vehicle.size(); })
        .def_property_readonly("seed", [](const RunLog& l) { return l.header.seed; })
        .def_property_readonly("scenario_sha256", [](const RunLog& l) { return l.header.scenario_sha256; })
        .def_property_readonly("vehicle", [](const RunLog& l) {
            std::vector<py::tuple> out;
            out.reserve(l.vehicle.size());
            for (const auto& r : l.vehicle)
                out.push_back(py::make_tuple(r.t_us, r.state.x, r.state.y, r.state.rot_z, r.state.speed));
            return out;
        }, "(t_us, x, y, heading, speed) per tick")
        .def_property_readonly("platform", [](const RunLog& l) {
            std::vector<py::tuple> out;
            out.reserve(l.platform.size());
            for (const auto& r : l.platform)
                out.push_back(py::make_tuple(r.t_us, r.seq, r.pitch, r.roll, r.yaw, r.heave, r.flags));
            return out;
        }, "(t_us, seq, pitch, roll, yaw, heave, flags) per tick")
        .def_property_readonly("touch", [](const RunLog& l) {
            std::vector<py::tuple> out;
            for (const auto& t : l.touch) out.push_back(py::make_tuple(t.t_us, t.mask()));
            return out;
        })
        .def_property_readonly("phone", [](const RunLog& l) { return l.phone; })
        .def("tables", [](const RunLog& l) {
            py::dict d;
            for (const auto& [name, text] : serialize_tables(l)) d[py::str(name)] = text;
            return d;
        }, "CSV text of each table, keyed by file name")
        .def("write", [](const RunLog& l, const std::filesystem::path& dir) { write_log(l, dir); })
        .def("__eq__", [](const RunLog& a, const RunLog& b) { return a == b; });

    m.def("simulate", &simulate, py::arg("scenario"), py::arg("duration") = 10.0,
          py::arg("inputs") = std::nullopt, py::arg("seed") = std::nullopt,
          py::arg("safety") = SafetyState{},
          "Runs the loop headless. `inputs` gives one DriverInput per tick.");
    m.def("read_log", [](const std::filesystem::path& dir) { return read_log(dir); });
    m.def("replay", [](const RunLog& log, double duration) {
        LoopConfig cfg;
        cfg.duration = duration;
        cfg.seed = log.header.seed;
        auto src = replay(log);
        const Scenario sc = load_scenario(log.scenario_document);
        py::gil_scoped_release release;
        return run(sc, log.scenario_document, cfg, *src);
    }, py::arg("log"), py::arg("duration"));
    m.def("render_plot", [](const RunLog& log, const PyScenario& sc) { return render_plot(log, sc.scenario); });
    m.def("analyze", [](const std::filesystem::path& dir, bool plot_only,
                        std::optional<std::filesystem::path> out_dir) {
        return analyze(dir, AnalyzeOptions{plot_only, std::move(out_dir)});
    }, py::arg("run_dir"), py::arg("plot_only") = false, py::arg("out_dir") = std::nullopt);
    m.def("sha256_hex", [](const py::bytes& b) { return sha256_hex(std::string(b)); });
}
