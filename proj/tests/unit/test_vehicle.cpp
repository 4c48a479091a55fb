#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "drivesim/vehicle.hpp"
#include "drivesim/world.hpp"

using namespace drivesim;

namespace {
const VehicleParams kParams{};
constexpr double kDt = 0.005;
}  // namespace

TEST(LongitudinalAccel, FullThrottle) {
    // 60 mph in 12 s.
    EXPECT_NEAR(longitudinal_accel({0, 1, 0}, 0.0), 2.2352, 1e-12);
    EXPECT_NEAR(longitudinal_accel({0, 1, 0}, 20.0), 2.2352, 1e-12);
}

TEST(LongitudinalAccel, FullBrake) {
    EXPECT_NEAR(longitudinal_accel({0, 0, 1}, 5.0), -6.7056, 1e-12);
}

TEST(LongitudinalAccel, CoastIsZero) {
    EXPECT_EQ(longitudinal_accel({0, 0, 0}, 13.0), 0.0);
}

TEST(DriverInput, ClampAndNan) {
    const DriverInput c = DriverInput{2.0, -0.5, std::nan("")}.clamped();
    EXPECT_EQ(c.steering, 1.0);
    EXPECT_EQ(c.throttle, 0.0);
    EXPECT_EQ(c.brake, 0.0);
    EXPECT_TRUE(c.in_range());
    EXPECT_FALSE((DriverInput{0, 1.01, 0}.in_range()));
}

TEST(Integrate, OneTickFromRest) {
    const VehicleState s0{};
    const auto s1 = integrate(s0, {0, 1, 0}, kParams, kDt);
    EXPECT_NEAR(s1.speed, 0.011176, 1e-15);
    EXPECT_EQ(s1.x, 0.0);  // Euler uses the pre-step speed
    EXPECT_EQ(s1.y, 0.0);
}

TEST(Integrate, SpeedClampedAtZero) {
    VehicleState s{};
    s.speed = 1.0;
    const auto s1 = integrate(s, {0, 0, 1}, kParams, 1.0);
    EXPECT_EQ(s1.speed, 0.0);
}

TEST(Integrate, ZeroSteeringKeepsHeadingAndY) {
    VehicleState s{};
    s.speed = 10.0;
    for (int i = 0; i < 1000; ++i) s = integrate(s, {0, 0.7, 0}, kParams, kDt);
    EXPECT_EQ(s.rot_z, 0.0);
    EXPECT_EQ(s.y, 0.0);
    EXPECT_GT(s.x, 0.0);
}

TEST(Integrate, RejectsNonPositiveDt) {
    EXPECT_THROW(integrate({}, {}, kParams, 0.0), std::invalid_argument);
}

TEST(Integrate, HeadingStaysWrapped) {
    VehicleState s{};
    s.speed = 15.0;
    for (int i = 0; i < 20000; ++i) {
        s = integrate(s, {1, 0, 0}, kParams, kDt);
        ASSERT_GT(s.rot_z, -std::numbers::pi);
        ASSERT_LE(s.rot_z, std::numbers::pi);
    }
}

TEST(Integrate, SteadyTurnRadius) {
    // Constant speed and steering: the bicycle traces a circle of radius
    // L / tan(delta).
    VehicleState s{};
    s.speed = 5.0;
    const double steer = 0.4;
    const double radius = kParams.wheelbase / std::tan(steer * kParams.max_steer);
    double max_err = 0.0;
    for (int i = 0; i < 4000; ++i) {
        s = integrate(s, {steer, 0, 0}, kParams, 1e-3);
        max_err = std::max(max_err, std::abs(std::hypot(s.x, s.y - radius) - radius));
    }
    EXPECT_LT(max_err, 0.02);
    EXPECT_NEAR(s.yaw_rate, 5.0 / radius, 1e-12);
}

TEST(WrapAngle, Range) {
    EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
    EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
    EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-15);
    EXPECT_EQ(wrap_angle(0.25), 0.25);
}

TEST(Collision, FarApart) {
    const std::vector<Obstacle> obs{{1, 10.0, 0.0}};
    EXPECT_FALSE(check_collision({}, obs));
}

TEST(Collision, Overlap) {
    const std::vector<Obstacle> obs{{4, 2.5, 0.0}};
    const auto e = check_collision({}, obs);
    ASSERT_TRUE(e);
    EXPECT_EQ(e->obstacle_id, 4);
}

TEST(Collision, NearestOfTwoWins) {
    const std::vector<Obstacle> obs{{9, 2.9, 0.0}, {8, 2.5, 0.0}};
    // Brute force over both candidates.
    int want = -1;
    double best = INFINITY;
    for (const auto& o : obs) {
        const double d = std::hypot(o.x, o.y);
        if (d < kVehicleRadius + kObstacleRadius && d < best) {
            best = d;
            want = o.id;
        }
    }
    EXPECT_EQ(check_collision({}, obs)->obstacle_id, want);
    EXPECT_EQ(want, 8);
}

TEST(Collision, TieGoesToLowerId) {
    const std::vector<Obstacle> obs{{7, 0.0, 2.0}, {3, 0.0, -2.0}};
    EXPECT_EQ(check_collision({}, obs)->obstacle_id, 3);
}

TEST(Collision, RelativeSpeed) {
    VehicleState v{};
    v.speed = 10.0;
    const std::vector<Obstacle> obs{{1, 2.0, 0.0, 0.0, 4.0}};
    EXPECT_NEAR(check_collision(v, obs)->relative_speed, 6.0, 1e-12);
}

TEST(CollisionDetector, OneEventPerEpisode) {
    CollisionDetector det;
    std::vector<Obstacle> obs{{1, 20.0, 0.0}};
    VehicleState v{};
    v.speed = 10.0;
    int events = 0;
    for (int i = 0; i < 800; ++i) {
        auto r = step(v, {0, 0, 0}, obs, det, kParams, kDt);
        v = r.state;
        if (r.collision) ++events;
    }
    EXPECT_EQ(events, 1);
}

TEST(CollisionDetector, RearmsAfterSeparation) {
    CollisionDetector det;
    const std::vector<Obstacle> obs{{1, 0.0, 0.0}};
    VehicleState v{};
    EXPECT_TRUE(det.update(v, obs));
    v.x = 3.2;  // apart but inside the hysteresis band
    EXPECT_FALSE(det.update(v, obs));
    v.x = 0.0;
    EXPECT_FALSE(det.update(v, obs));
    v.x = 3.6;
    EXPECT_FALSE(det.update(v, obs));
    EXPECT_FALSE(det.in_contact(1));
    v.x = 0.0;
    EXPECT_TRUE(det.update(v, obs));
}

TEST(Obstacles, ConstantVelocity) {
    std::vector<Obstacle> obs{{1, 0.0, 0.0, std::numbers::pi / 2, 2.0}};
    for (int i = 0; i < 200; ++i) advance_obstacles(obs, kDt);
    EXPECT_NEAR(obs[0].x, 0.0, 1e-12);
    EXPECT_NEAR(obs[0].y, 2.0, 1e-12);
}

TEST(Integrate, FiniteForRandomInputs) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3, 3);
    VehicleState s{};
    for (int i = 0; i < 100000; ++i) {
        s = integrate(s, DriverInput{u(rng), u(rng), u(rng)}.clamped(), kParams, kDt);
        ASSERT_TRUE(std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.speed));
        ASSERT_GE(s.speed, 0.0);
    }
}
