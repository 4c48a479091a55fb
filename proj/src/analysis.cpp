#include "drivesim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>

#include "csv.hpp"

namespace drivesim {

namespace fs = std::filesystem;

const std::optional<NearestObject>& NearestObjects::operator[](RadarMount m) const {
    switch (m) {
        case RadarMount::Front: return front;
        case RadarMount::Left: return left;
        case RadarMount::Right: return right;
    }
    return front;
}

NearestObjects nearest_objects(std::span<const RadarRow> rows) {
    NearestObjects out;
    if (!rows.empty()) out.t_us = rows.front().t_us;
    for (const auto& r : rows) {
        auto& slot = r.sensor == RadarMount::Front  ? out.front
                     : r.sensor == RadarMount::Left ? out.left
                                                    : out.right;
        const NearestObject cand{r.reading.object_id, r.reading.range, r.reading.azimuth};
        if (!slot || cand.range < slot->range ||
            (cand.range == slot->range && cand.object_id < slot->object_id))
            slot = cand;
    }
    return out;
}

std::vector<NearestObjects> nearest_objects_by_tick(std::span<const RadarRow> radar) {
    std::vector<NearestObjects> out;
    std::size_t i = 0;
    while (i < radar.size()) {
        std::size_t j = i;
        while (j < radar.size() && radar[j].t_us == radar[i].t_us) ++j;
        out.push_back(nearest_objects(radar.subspan(i, j - i)));
        i = j;
    }
    return out;
}

std::vector<LaneIndicator> lane_indicators(const RunLog& log, const Road& road) {
    std::vector<LaneIndicator> out;
    out.reserve(log.vehicle.size());
    for (const auto& row : log.vehicle) {
        const auto p = road.nearest(row.state.x, row.state.y);
        out.push_back({row.t_us, lane_index(p.offset, road), p.offset});
    }
    return out;
}

// ---- SVG plan view -------------------------------------------------------------

namespace {

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void add(double x, double y) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
    }
};

struct Point {
    double x;
    double y;
};

class Canvas {
public:
    static constexpr double kWidth = 1000.0;
    static constexpr double kMargin = 20.0;

    explicit Canvas(Bounds b) {
        // Keep very thin worlds (a long straight road) readable.
        constexpr double min_extent = 40.0;
        const double cx = 0.5 * (b.min_x + b.max_x);
        const double cy = 0.5 * (b.min_y + b.max_y);
        const double w = std::max(b.max_x - b.min_x, min_extent);
        const double h = std::max(b.max_y - b.min_y, min_extent);
        min_x_ = cx - 0.5 * w;
        max_y_ = cy + 0.5 * h;
        scale_ = (kWidth - 2 * kMargin) / w;
        if (h * scale_ > kWidth) scale_ = (kWidth - 2 * kMargin) / h;
        width_ = std::ceil(w * scale_ + 2 * kMargin);
        height_ = std::ceil(h * scale_ + 2 * kMargin);
    }

    Point map(double x, double y) const {
        return {kMargin + (x - min_x_) * scale_, kMargin + (max_y_ - y) * scale_};
    }
    double scale() const { return scale_; }
    double width() const { return width_; }
    double height() const { return height_; }

private:
    double min_x_ = 0.0;
    double max_y_ = 0.0;
    double scale_ = 1.0;
    double width_ = 0.0;
    double height_ = 0.0;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    // Avoid "-0.00" so output does not depend on the sign of a rounded zero.
    if (std::string_view(buf) == "-0.00") return "0.00";
    return buf;
}

std::string point_list(const Canvas& c, const std::vector<Point>& world) {
    std::string s;
    for (std::size_t i = 0; i < world.size(); ++i) {
        const Point p = c.map(world[i].x, world[i].y);
        if (i) s.push_back(' ');
        s += fmt(p.x) + "," + fmt(p.y);
    }
    return s;
}

std::string path_data(const Canvas& c, const std::vector<Point>& world) {
    std::string s;
    for (std::size_t i = 0; i < world.size(); ++i) {
        const Point p = c.map(world[i].x, world[i].y);
        s += (i ? " L" : "M") + fmt(p.x) + " " + fmt(p.y);
    }
    return s;
}

std::vector<Point> offset_line(const Road& road, double offset) {
    const double step = 1.0;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(road.total_length() / step)));
    std::vector<Point> pts;
    pts.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = road.total_length() * static_cast<double>(i) / static_cast<double>(n);
        const auto f = road.frame_at(s).center;
        pts.push_back({f.x - offset * std::sin(f.heading), f.y + offset * std::cos(f.heading)});
    }
    return pts;
}

const char* sensor_color(RadarMount m) {
    switch (m) {
        case RadarMount::Front: return PlotColors::red;
        case RadarMount::Left: return PlotColors::blue;
        case RadarMount::Right: return PlotColors::light_blue;
    }
    return PlotColors::grey;
}

struct Detection {
    RadarMount sensor;
    Point vehicle;
    Point object;
    double azimuth;
    std::uint64_t t_us;
};

}  // namespace

std::string render_plot(const RunLog& log, const Scenario& scenario) {
    if (log.vehicle.empty()) throw EmptyLogError("cannot plot an empty run log");
    const Road& road = scenario.road;

    std::map<std::uint64_t, const VehicleRow*> by_time;
    for (const auto& v : log.vehicle) by_time.emplace(v.t_us, &v);

    // First detection of each object, in log order.
    std::map<int, Detection> detections;
    for (const auto& r : log.radar) {
        if (detections.contains(r.reading.object_id)) continue;
        auto it = by_time.find(r.t_us);
        if (it == by_time.end()) continue;
        const auto& v = it->second->state;
        const double a = v.rot_z + r.reading.azimuth;
        detections.emplace(r.reading.object_id,
                           Detection{r.sensor,
                                     {v.x, v.y},
                                     {v.x + r.reading.range * std::cos(a),
                                      v.y + r.reading.range * std::sin(a)},
                                     r.reading.azimuth,
                                     r.t_us});
    }

    std::vector<std::vector<Point>> curbs{offset_line(road, -road.half_width()),
                                          offset_line(road, road.half_width())};
    std::vector<std::vector<Point>> lane_lines;
    for (int j = 1; j < road.num_lanes(); ++j) lane_lines.push_back(offset_line(road, road.boundary_offset(j)));

    std::vector<Point> path;
    for (std::size_t i = 0; i < log.vehicle.size(); i += 10)
        path.push_back({log.vehicle[i].state.x, log.vehicle[i].state.y});
    if ((log.vehicle.size() - 1) % 10 != 0)
        path.push_back({log.vehicle.back().state.x, log.vehicle.back().state.y});

    Bounds b;
    for (const auto& line : curbs)
        for (const auto& p : line) b.add(p.x, p.y);
    for (const auto& p : path) b.add(p.x, p.y);
    for (const auto& [id, d] : detections) b.add(d.object.x, d.object.y);
    for (const auto& o : scenario.obstacles)
        if (!detections.contains(o.id)) b.add(o.x, o.y);

    const Canvas c(b);
    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(c.width()) + "\" height=\"" +
           fmt(c.height()) + "\" viewBox=\"0 0 " + fmt(c.width()) + " " + fmt(c.height()) + "\">\n";
    svg += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + fmt(c.width()) + "\" height=\"" +
           fmt(c.height()) + "\" fill=\"#FFFFFF\"/>\n";

    svg += "<g id=\"road\">\n";
    for (const auto& line : curbs)
        svg += "<path class=\"curb\" d=\"" + path_data(c, line) + "\" fill=\"none\" stroke=\"" +
               PlotColors::black + "\" stroke-width=\"2\"/>\n";
    for (const auto& line : lane_lines)
        svg += "<path class=\"lane-line\" d=\"" + path_data(c, line) +
               "\" fill=\"none\" stroke=\"" + PlotColors::yellow +
               "\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    svg += "</g>\n";

    svg += "<polyline class=\"path\" points=\"" + point_list(c, path) + "\" fill=\"none\" stroke=\"" +
           PlotColors::blue + "\" stroke-width=\"1.5\"/>\n";

    svg += "<g id=\"detections\">\n";
    const double marker_r = std::max(kObstacleRadius * c.scale(), 3.0);
    for (const auto& [id, d] : detections) {
        const Point v = c.map(d.vehicle.x, d.vehicle.y);
        const Point o = c.map(d.object.x, d.object.y);
        const char* color = sensor_color(d.sensor);
        const std::string sensor = to_string(d.sensor);
        char az[32];
        std::snprintf(az, sizeof az, "%.1f", d.azimuth * 180.0 / std::numbers::pi);
        svg += "<line class=\"ray " + sensor + "\" x1=\"" + fmt(v.x) + "\" y1=\"" + fmt(v.y) +
               "\" x2=\"" + fmt(o.x) + "\" y2=\"" + fmt(o.y) + "\" stroke=\"" + color +
               "\" stroke-width=\"1\" stroke-dasharray=\"3 3\"/>\n";
        svg += "<circle class=\"obstacle " + sensor + "\" cx=\"" + fmt(o.x) + "\" cy=\"" + fmt(o.y) +
               "\" r=\"" + fmt(marker_r) + "\" fill=\"" + color + "\"><title>object " +
               std::to_string(id) + " " + sensor + " azimuth " + az + " deg t_us " +
               std::to_string(d.t_us) + "</title></circle>\n";
    }
    for (const auto& o : scenario.obstacles) {
        if (detections.contains(o.id)) continue;
        const Point p = c.map(o.x, o.y);
        svg += "<circle class=\"obstacle undetected\" cx=\"" + fmt(p.x) + "\" cy=\"" + fmt(p.y) +
               "\" r=\"" + fmt(marker_r) + "\" fill=\"none\" stroke=\"" + PlotColors::grey +
               "\"><title>object " + std::to_string(o.id) + " not detected</title></circle>\n";
    }
    svg += "</g>\n";

    // Vehicle box at the final pose, coloured by lane.
    const auto& last = log.vehicle.back().state;
    const auto lane = lane_index(road.nearest(last.x, last.y).offset, road);
    const char* fill = !lane ? "none" : (*lane % 2 == 0 ? PlotColors::blue : PlotColors::light_blue);
    constexpr double half_len = 2.25;
    constexpr double half_wid = 0.9;
    const double ch = std::cos(last.rot_z);
    const double sh = std::sin(last.rot_z);
    std::vector<Point> box;
    for (auto [l, w] : {std::pair{half_len, half_wid}, {half_len, -half_wid}, {-half_len, -half_wid},
                        {-half_len, half_wid}})
        box.push_back({last.x + l * ch - w * sh, last.y + l * sh + w * ch});
    svg += "<polygon class=\"vehicle\" points=\"" + point_list(c, box) + "\" fill=\"" + fill +
           "\" stroke=\"" + PlotColors::blue + "\" stroke-width=\"1\"><title>lane " +
           (lane ? std::to_string(*lane) : std::string("off road")) + "</title></polygon>\n";

    svg += "</svg>\n";
    return svg;
}

// ---- batch analysis ------------------------------------------------------------

std::vector<std::string> analyze(const fs::path& run_dir, const AnalyzeOptions& options) {
    auto [log, warnings] = read_log_checked(run_dir);
    if (log.scenario_document.empty())
        throw LogFormatError("scenario.json", "", "run directory has no scenario.json");
    const Scenario scenario = load_scenario(log.scenario_document);
    const fs::path out = options.out_dir.value_or(run_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw std::runtime_error("cannot create " + out.string() + ": " + ec.message());

    if (!options.plot_only) {
        std::string s = "t_us,lane_index,center_offset\n";
        for (const auto& li : lane_indicators(log, scenario.road))
            csv::Row(s).num(li.t_us).num(li.lane_index.value_or(kOffRoad)).num(li.center_offset);
        csv::write_file(out / "lane_indicators.csv", s);

        s = "t_us,sensor,object_id,range,azimuth\n";
        for (const auto& n : nearest_objects_by_tick(log.radar)) {
            for (auto m : {RadarMount::Front, RadarMount::Left, RadarMount::Right}) {
                if (const auto& o = n[m])
                    csv::Row(s).num(n.t_us).text(to_string(m)).num(o->object_id).num(o->range)
                        .num(o->azimuth);
            }
        }
        csv::write_file(out / "nearest_objects.csv", s);
    }
    csv::write_file(out / "plot.svg", render_plot(log, scenario));
    return warnings;
}

}  // namespace drivesim
