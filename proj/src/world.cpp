#include "drivesim/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace drivesim {

namespace {

using json = nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Pose advance_pose(const Pose& p, const RoadSegment& seg, double ds) {
    if (seg.kind == SegmentKind::Straight) {
        return {p.x + ds * std::cos(p.heading), p.y + ds * std::sin(p.heading), p.heading};
    }
    const double k = seg.signed_curvature;
    const double h = p.heading + k * ds;
    return {p.x + (std::sin(h) - std::sin(p.heading)) / k,
            p.y - (std::cos(h) - std::cos(p.heading)) / k, h};
}

struct Candidate {
    double s;
    double x;
    double y;
    double heading;
};

}  // namespace

Road::Road(std::vector<RoadSegment> segments, double lane_width, int num_lanes, Pose origin)
    : segments_(std::move(segments)), lane_width_(lane_width), num_lanes_(num_lanes),
      origin_(origin) {
    if (segments_.empty()) throw ScenarioError("road.segments", "road has no segments");
    if (!(lane_width_ > 0.0) || !std::isfinite(lane_width_))
        throw ScenarioError("road.lane_width", "lane_width must be > 0");
    if (num_lanes_ < 1) throw ScenarioError("road.num_lanes", "num_lanes must be >= 1");

    Pose p = origin_;
    double s = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& seg = segments_[i];
        const std::string field = "road.segments[" + std::to_string(i) + "]";
        if (!(seg.length > 0.0) || !std::isfinite(seg.length))
            throw ScenarioError(field + ".length", "segment length must be > 0");
        if (!(std::abs(seg.signed_curvature) < 1.0))
            throw ScenarioError(field + ".curvature", "|curvature| must be < 1");
        if ((seg.kind == SegmentKind::Arc) != (seg.signed_curvature != 0.0))
            throw ScenarioError(field + ".curvature",
                                "arc segments need non-zero curvature, straights zero");
        starts_.push_back(p);
        start_s_.push_back(s);
        p = advance_pose(p, seg, seg.length);
        s += seg.length;
    }
    total_length_ = s;
}

RoadFrame Road::frame_at(double s) const {
    if (!(s >= 0.0 && s <= total_length_))
        throw RoadRangeError("arc length " + std::to_string(s) + " outside [0, " +
                             std::to_string(total_length_) + "]");
    // Segment whose start is the last one <= s.
    auto it = std::upper_bound(start_s_.begin(), start_s_.end(), s);
    const auto i = static_cast<std::size_t>(std::distance(start_s_.begin(), it)) - 1;
    const auto& seg = segments_[i];
    const double ds = std::min(s - start_s_[i], seg.length);
    return {advance_pose(starts_[i], seg, ds), seg.signed_curvature};
}

RoadProjection Road::nearest(double x, double y) const {
    Candidate best{0.0, 0.0, 0.0, 0.0};
    double best_d2 = std::numeric_limits<double>::infinity();

    auto consider = [&](double s, const Pose& p) {
        const double dx = x - p.x;
        const double dy = y - p.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = {s, p.x, p.y, p.heading};
        }
    };

    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& seg = segments_[i];
        const Pose& p0 = starts_[i];
        const double s0 = start_s_[i];

        // Interior candidates are checked in increasing s so that strict
        // improvement keeps the smallest s on ties.
        double interior = -1.0;
        if (seg.kind == SegmentKind::Straight) {
            const double t = (x - p0.x) * std::cos(p0.heading) + (y - p0.y) * std::sin(p0.heading);
            if (t > 0.0 && t < seg.length) interior = t;
        } else {
            const double k = seg.signed_curvature;
            const double cx = p0.x - std::sin(p0.heading) / k;
            const double cy = p0.y + std::cos(p0.heading) / k;
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx != 0.0 || dy != 0.0) {
                // Tangent heading at the point of the circle nearest (x, y).
                const double psi = k > 0.0 ? std::atan2(dx, -dy) : std::atan2(-dx, dy);
                double sweep = std::fmod((k > 0.0 ? 1.0 : -1.0) * (psi - p0.heading), kTwoPi);
                if (sweep < 0.0) sweep += kTwoPi;
                const double t = sweep / std::abs(k);
                if (t > 0.0 && t < seg.length) interior = t;
            }
        }

        consider(s0, p0);
        if (interior > 0.0) consider(s0 + interior, advance_pose(p0, seg, interior));
        if (i + 1 == segments_.size())
            consider(s0 + seg.length, advance_pose(p0, seg, seg.length));
    }

    const double nx = -std::sin(best.heading);
    const double ny = std::cos(best.heading);
    return {best.s, (x - best.x) * nx + (y - best.y) * ny, std::sqrt(best_d2)};
}

RoadProjection Road::project(double x, double y) const {
    auto p = nearest(x, y);
    if (!(p.distance <= catchment()))
        throw RoadRangeError("point (" + std::to_string(x) + ", " + std::to_string(y) + ") is " +
                             std::to_string(p.distance) + " m from the road center line");
    return p;
}

RoadFrame road_frame_at(const Road& road, double s) { return road.frame_at(s); }

RoadProjection lateral_offset(const Road& road, double x, double y) {
    return road.project(x, y);
}

std::array<double, 4> Scenario::hands_at(double t) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::array<double, 4> d{0.0, 0.0, inf, inf};
    for (const auto& p : hand_tracks) {
        if (p.t > t) break;
        d = p.distances;
    }
    return d;
}

// ---- scenario document ---------------------------------------------------------

namespace {

int line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            const std::string field = where.empty() ? it.key() : where + "." + it.key();
            throw ScenarioError(field, "unknown key '" + field + "'");
        }
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    const std::string field = where.empty() ? key : where + "." + key;
    if (it == obj.end()) throw ScenarioError(field, "missing required field '" + field + "'");
    return *it;
}

double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ScenarioError(field, "'" + field + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ScenarioError(field, "'" + field + "' must be finite");
    return d;
}

const json& object(const json& v, const std::string& field) {
    if (!v.is_object()) throw ScenarioError(field, "'" + field + "' must be an object");
    return v;
}

const json& array(const json& v, const std::string& field, std::size_t exact = 0) {
    if (!v.is_array()) throw ScenarioError(field, "'" + field + "' must be an array");
    if (exact != 0 && v.size() != exact)
        throw ScenarioError(field, "'" + field + "' must have " + std::to_string(exact) +
                                       " entries");
    return v;
}

Road parse_road(const json& r) {
    object(r, "road");
    reject_unknown(r, "road", {"segments", "lane_width", "num_lanes", "origin"});
    std::vector<RoadSegment> segments;
    const auto& segs = array(require(r, "road", "segments"), "road.segments");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string where = "road.segments[" + std::to_string(i) + "]";
        const auto& s = object(segs[i], where);
        reject_unknown(s, where, {"kind", "length", "curvature"});
        const auto& kind = require(s, where, "kind");
        RoadSegment seg;
        if (kind == "straight") {
            seg.kind = SegmentKind::Straight;
        } else if (kind == "arc") {
            seg.kind = SegmentKind::Arc;
        } else {
            throw ScenarioError(where + ".kind", "kind must be \"straight\" or \"arc\"");
        }
        seg.length = number(require(s, where, "length"), where + ".length");
        if (auto c = s.find("curvature"); c != s.end())
            seg.signed_curvature = number(*c, where + ".curvature");
        segments.push_back(seg);
    }
    const double lane_width = number(require(r, "road", "lane_width"), "road.lane_width");
    const auto& nl = require(r, "road", "num_lanes");
    if (!nl.is_number_integer()) throw ScenarioError("road.num_lanes", "num_lanes must be an integer");
    Pose origin;
    if (auto o = r.find("origin"); o != r.end()) {
        array(*o, "road.origin", 3);
        origin = {number((*o)[0], "road.origin[0]"), number((*o)[1], "road.origin[1]"),
                  number((*o)[2], "road.origin[2]")};
    }
    return Road(std::move(segments), lane_width, nl.get<int>(), origin);
}

void parse_gains(const json& g, CueingGains& gains, VehicleParams& vp) {
    object(g, "gains");
    reject_unknown(g, "gains",
                   {"k_pitch", "k_roll", "k_yaw", "k_heave", "shake_magnitude", "shake_frequency",
                    "shake_duration", "max_accel", "max_decel", "wheelbase", "max_steer",
                    "k_roll_dyn", "k_pitch_dyn"});
    auto opt = [&](const char* key, double& out) {
        if (auto it = g.find(key); it != g.end()) out = number(*it, std::string("gains.") + key);
    };
    opt("k_pitch", gains.k_pitch);
    opt("k_roll", gains.k_roll);
    opt("k_yaw", gains.k_yaw);
    opt("k_heave", gains.k_heave);
    opt("shake_magnitude", gains.shake_magnitude);
    opt("shake_frequency", gains.shake_frequency);
    opt("shake_duration", gains.shake_duration);
    opt("max_accel", vp.max_accel);
    opt("max_decel", vp.max_decel);
    opt("wheelbase", vp.wheelbase);
    opt("max_steer", vp.max_steer);
    opt("k_roll_dyn", vp.k_roll_dyn);
    opt("k_pitch_dyn", vp.k_pitch_dyn);

    if (!(gains.shake_duration > 0.0))
        throw ScenarioError("gains.shake_duration", "shake_duration must be > 0");
    if (!(gains.shake_frequency > 0.0))
        throw ScenarioError("gains.shake_frequency", "shake_frequency must be > 0");
    if (gains.shake_magnitude < 0.0)
        throw ScenarioError("gains.shake_magnitude", "shake_magnitude must be >= 0");
    if (!(vp.max_accel >= 0.0)) throw ScenarioError("gains.max_accel", "max_accel must be >= 0");
    if (!(vp.max_decel >= 0.0)) throw ScenarioError("gains.max_decel", "max_decel must be >= 0");
    if (!(vp.wheelbase > 0.0)) throw ScenarioError("gains.wheelbase", "wheelbase must be > 0");
    if (!(vp.max_steer > 0.0 && vp.max_steer < std::numbers::pi / 2))
        throw ScenarioError("gains.max_steer", "max_steer must be in (0, pi/2)");
}

}  // namespace

Scenario load_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const int line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ScenarioError("", "parse error at line " + std::to_string(line) + ": " + e.what(),
                            line);
    }
    object(doc, "document");
    reject_unknown(doc, "", {"road", "obstacles", "vehicle_start", "seed", "preview_distances",
                             "gains", "hand_tracks"});

    Scenario sc{parse_road(require(doc, "", "road")), {}, {}, 0, {}, {}, {10.0, 20.0, 30.0}, {}};

    if (auto it = doc.find("obstacles"); it != doc.end()) {
        const auto& obs = array(*it, "obstacles");
        std::set<int> ids;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const std::string where = "obstacles[" + std::to_string(i) + "]";
            const auto& o = object(obs[i], where);
            reject_unknown(o, where, {"id", "x", "y", "heading", "speed"});
            const auto& id = require(o, where, "id");
            if (!id.is_number_integer() || id.get<long long>() <= 0 ||
                id.get<long long>() > std::numeric_limits<int>::max())
                throw ScenarioError(where + ".id", "obstacle id must be a positive integer");
            Obstacle ob;
            ob.id = id.get<int>();
            if (!ids.insert(ob.id).second)
                throw ScenarioError(where + ".id", "duplicate obstacle id " + std::to_string(ob.id));
            ob.x = number(require(o, where, "x"), where + ".x");
            ob.y = number(require(o, where, "y"), where + ".y");
            if (auto h = o.find("heading"); h != o.end()) ob.heading = number(*h, where + ".heading");
            if (auto v = o.find("speed"); v != o.end()) ob.speed = number(*v, where + ".speed");
            if (ob.speed < 0.0) throw ScenarioError(where + ".speed", "obstacle speed must be >= 0");
            sc.obstacles.push_back(ob);
        }
    }

    {
        const auto& vs = array(require(doc, "", "vehicle_start"), "vehicle_start", 4);
        sc.vehicle_start = {number(vs[0], "vehicle_start[0]"), number(vs[1], "vehicle_start[1]"),
                            number(vs[2], "vehicle_start[2]"), number(vs[3], "vehicle_start[3]")};
        if (sc.vehicle_start.speed < 0.0)
            throw ScenarioError("vehicle_start", "start speed must be >= 0");
        const auto p = sc.road.nearest(sc.vehicle_start.x, sc.vehicle_start.y);
        if (!(p.distance <= sc.road.num_lanes() * sc.road.lane_width()))
            throw ScenarioError("vehicle_start", "vehicle start is not on or near the road");
    }

    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned()) throw ScenarioError("seed", "seed must be an unsigned integer");
        sc.seed = it->get<std::uint64_t>();
    }

    if (auto it = doc.find("preview_distances"); it != doc.end()) {
        const auto& pd = array(*it, "preview_distances", 3);
        for (std::size_t i = 0; i < 3; ++i)
            sc.preview_distances[i] =
                number(pd[i], "preview_distances[" + std::to_string(i) + "]");
        if (!(sc.preview_distances[0] > 0.0 && sc.preview_distances[0] < sc.preview_distances[1] &&
              sc.preview_distances[1] < sc.preview_distances[2]))
            throw ScenarioError("preview_distances",
                                "preview_distances must be positive and strictly increasing");
    }

    if (auto it = doc.find("gains"); it != doc.end()) parse_gains(*it, sc.gains, sc.vehicle);

    if (auto it = doc.find("hand_tracks"); it != doc.end()) {
        const auto& ht = array(*it, "hand_tracks");
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ht.size(); ++i) {
            const std::string where = "hand_tracks[" + std::to_string(i) + "]";
            const auto& e = object(ht[i], where);
            reject_unknown(e, where, {"t", "distances"});
            HandTrackPoint p;
            p.t = number(require(e, where, "t"), where + ".t");
            if (!(p.t > prev)) throw ScenarioError(where + ".t", "hand_tracks must be time-ordered");
            prev = p.t;
            const auto& d = array(require(e, where, "distances"), where + ".distances", 4);
            for (std::size_t q = 0; q < 4; ++q) {
                // null = hand away from the wheel
                if (d[q].is_null()) {
                    p.distances[q] = std::numeric_limits<double>::infinity();
                    continue;
                }
                p.distances[q] = number(d[q], where + ".distances");
                if (p.distances[q] < 0.0)
                    throw ScenarioError(where + ".distances", "distances must be >= 0");
            }
            sc.hand_tracks.push_back(p);
        }
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

}  // namespace drivesim
