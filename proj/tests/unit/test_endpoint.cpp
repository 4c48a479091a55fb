#include <gtest/gtest.h>

#include <json.hpp>

#include "drivesim/endpoint.hpp"

using namespace drivesim;

namespace {

PlatformCommand command(std::uint32_t seq, bool estop = false, bool enabled = true) {
    PlatformCommand c;
    c.seq = seq;
    c.t_us = (seq + 1) * 5000ull;
    c.pitch = enabled ? 0.1f : 0.0f;
    c.roll = enabled ? -0.05f : 0.0f;
    c.yaw = enabled ? 0.3f : 0.0f;
    c.heave = enabled ? 0.01f : 0.0f;
    c.flags.estop = estop;
    c.flags.motion_enabled = enabled;
    return c;
}

constexpr std::array<float, 4> kNeutral{0, 0, 0, 0};

}  // namespace

TEST(Endpoint, InOrderStream) {
    PlatformEndpoint ep;
    for (std::uint32_t i = 0; i < 2000; ++i) ASSERT_FALSE(ep.ingest(encode_command(command(i))));
    EXPECT_EQ(ep.report().received, 2000u);
    EXPECT_EQ(ep.report().gaps, 0u);
    EXPECT_EQ(ep.report().crc_errors, 0u);
    EXPECT_EQ(ep.report().last_seq, 1999u);
}

TEST(Endpoint, GapCounted) {
    PlatformEndpoint ep;
    for (std::uint32_t s : {0u, 1u, 3u}) ep.ingest(encode_command(command(s)));
    EXPECT_EQ(ep.report().gaps, 1u);
}

TEST(Endpoint, OutOfOrderAndDuplicates) {
    PlatformEndpoint ep;
    for (std::uint32_t s : {0u, 2u, 1u, 2u, 3u}) ep.apply(command(s));
    EXPECT_EQ(ep.report().out_of_order, 2u);
    EXPECT_EQ(ep.report().last_seq, 3u);
}

TEST(Endpoint, CorruptPacketsCounted) {
    PlatformEndpoint ep;
    auto b = encode_command(command(0));
    b[12] ^= 1;
    EXPECT_EQ(ep.ingest(b), DecodeError::BadCrc);
    EXPECT_EQ(ep.ingest(std::span(b).first(10)), DecodeError::BadLength);
    EXPECT_EQ(ep.report().crc_errors, 1u);
    EXPECT_EQ(ep.report().malformed, 1u);
    EXPECT_EQ(ep.report().received, 0u);
}

TEST(Endpoint, EstopSnapsNeutral) {
    PlatformEndpoint ep;
    ep.apply(command(0));
    EXPECT_NE(ep.report().attitude, kNeutral);
    auto c = command(1, true, false);
    c.pitch = 0.2f;  // axes in an estop packet are ignored
    ep.apply(c);
    EXPECT_TRUE(ep.report().estopped);
    EXPECT_EQ(ep.report().attitude, kNeutral);
}

// Enumerates every (estop, motion_enabled) packet kind from both latch
// states and checks the reset rule.
TEST(Endpoint, LatchStateMachine) {
    for (bool latched : {false, true}) {
        for (bool estop : {false, true}) {
            for (bool enabled : {false, true}) {
                PlatformEndpoint ep;
                ep.apply(command(0, latched, !latched));
                ASSERT_EQ(ep.report().estopped, latched);
                ep.apply(command(1, estop, enabled));
                const bool want_latched = estop || (latched && !enabled);
                EXPECT_EQ(ep.report().estopped, want_latched)
                    << latched << estop << enabled;
                if (want_latched) EXPECT_EQ(ep.report().attitude, kNeutral);
                else EXPECT_EQ(ep.report().attitude[0], enabled ? 0.1f : 0.0f);
            }
        }
    }
}

TEST(Endpoint, LatchHoldsUntilExplicitClear) {
    PlatformEndpoint ep;
    ep.apply(command(0, true, false));
    // Estop released but the interlock has not re-enabled motion.
    for (std::uint32_t s = 1; s < 50; ++s) {
        auto c = command(s, false, false);
        c.pitch = 0.3f;
        ep.apply(c);
        ASSERT_TRUE(ep.report().estopped);
        ASSERT_EQ(ep.report().attitude, kNeutral);
    }
    ep.apply(command(50, false, true));
    EXPECT_FALSE(ep.report().estopped);
    EXPECT_EQ(ep.report().attitude[0], 0.1f);
}

TEST(Endpoint, ReportJson) {
    PlatformEndpoint ep;
    ep.apply(command(0));
    const auto j = nlohmann::json::parse(ep.report().to_json());
    EXPECT_EQ(j["received"], 1);
    EXPECT_EQ(j["gaps"], 0);
    EXPECT_EQ(j["crc_errors"], 0);
    EXPECT_EQ(j["attitude"].size(), 4u);
    EXPECT_EQ(j["estopped"], false);
}
