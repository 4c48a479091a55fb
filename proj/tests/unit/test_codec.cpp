#include <gtest/gtest.h>

#include <random>

#include <zlib.h>

#include "drivesim/codec.hpp"

using namespace drivesim;

namespace {

// All-zero command, seq 0, t_us 0. CRC computed beforehand with zlib over
// the 34-byte prefix.
const Bytes kGolden{0x46, 0x44, 0x30, 0x31, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x07, 0x84, 0x3e, 0xfa};

// seq 1, t_us 5000, motion_enabled.
const Bytes kGoldenSeq1{0x46, 0x44, 0x30, 0x31, 0x01, 0x04, 0x01, 0x00, 0x00, 0x00, 0x88, 0x13, 0x00,
                        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x6e, 0x6d, 0xc6, 0x44};

template <typename T>
bool is_error(const Decoded<T>& d, DecodeError e) {
    auto* p = std::get_if<DecodeError>(&d);
    return p && *p == e;
}

}  // namespace

TEST(Crc32, MatchesZlib) {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 300; ++n) {
        Bytes b(static_cast<std::size_t>(n));
        for (auto& x : b) x = static_cast<std::uint8_t>(rng());
        const auto want = static_cast<std::uint32_t>(::crc32(0L, b.data(), static_cast<uInt>(b.size())));
        EXPECT_EQ(drivesim::crc32(b), want) << n;
    }
    const std::string check = "123456789";
    EXPECT_EQ(drivesim::crc32({reinterpret_cast<const std::uint8_t*>(check.data()), check.size()}),
              0xCBF43926u);
}

TEST(Command, GoldenAllZero) {
    EXPECT_EQ(encode_command(PlatformCommand{}), kGolden);
    const auto d = decode_command(kGolden);
    ASSERT_TRUE(std::holds_alternative<PlatformCommand>(d));
    EXPECT_EQ(std::get<PlatformCommand>(d), PlatformCommand{});
}

TEST(Command, GoldenLayout) {
    PlatformCommand c;
    c.seq = 1;
    c.t_us = 5000;
    c.flags.motion_enabled = true;
    const auto b = encode_command(c);
    ASSERT_EQ(b.size(), kCommandSize);
    EXPECT_EQ(b[5], 0x04);
    EXPECT_EQ(b, kGoldenSeq1);
}

TEST(Command, FloatAxesLittleEndian) {
    PlatformCommand c;
    c.pitch = 1.0f;   // 0x3F800000
    c.heave = -2.0f;  // 0xC0000000
    const auto b = encode_command(c);
    EXPECT_EQ((Bytes{b.begin() + 18, b.begin() + 22}), (Bytes{0x00, 0x00, 0x80, 0x3F}));
    EXPECT_EQ((Bytes{b.begin() + 30, b.begin() + 34}), (Bytes{0x00, 0x00, 0x00, 0xC0}));
}

TEST(Command, RandomRoundTrip) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (int i = 0; i < 10000; ++i) {
        PlatformCommand c;
        c.seq = static_cast<std::uint32_t>(rng());
        c.t_us = rng();
        c.pitch = u(rng);
        c.roll = u(rng);
        c.yaw = u(rng) * 100.0f;
        c.heave = u(rng) * 0.1f;
        c.flags = CommandFlags::from_bits(static_cast<std::uint8_t>(rng() & 7));
        const auto d = decode_command(encode_command(c));
        ASSERT_TRUE(std::holds_alternative<PlatformCommand>(d));
        ASSERT_EQ(std::get<PlatformCommand>(d), c);
    }
}

TEST(Command, Truncated) {
    const Bytes b(kGolden.begin(), kGolden.end() - 1);
    EXPECT_TRUE(is_error(decode_command(b), DecodeError::BadLength));
    Bytes longer = kGolden;
    longer.push_back(0);
    EXPECT_TRUE(is_error(decode_command(longer), DecodeError::BadLength));
}

TEST(Command, EverySingleBitFlipRejected) {
    for (std::size_t byte = 0; byte < kGolden.size(); ++byte) {
        for (int bit = 0; bit < 8; ++bit) {
            Bytes b = kGolden;
            b[byte] ^= static_cast<std::uint8_t>(1u << bit);
            const auto d = decode_command(b);
            EXPECT_TRUE(std::holds_alternative<DecodeError>(d)) << byte << ":" << bit;
        }
    }
}

TEST(Command, PayloadFlipIsBadCrc) {
    Bytes b = kGolden;
    b[20] ^= 0x10;
    EXPECT_TRUE(is_error(decode_command(b), DecodeError::BadCrc));
}

TEST(Command, MagicAndVersion) {
    Bytes b = kGolden;
    b[0] = 'X';
    EXPECT_TRUE(is_error(decode_command(b), DecodeError::BadMagic));
    b = kGolden;
    b[4] = 2;
    EXPECT_TRUE(is_error(decode_command(b), DecodeError::BadVersion));
}

TEST(Touch, LayoutAndRoundTrip) {
    TouchSample s{20'000, {true, false, true, true}};
    const auto b = encode_touch(3, s);
    ASSERT_EQ(b.size(), kTouchDatagramSize);
    EXPECT_EQ((Bytes{b.begin(), b.begin() + 4}), (Bytes{'T', 'S', '0', '1'}));
    EXPECT_EQ(b[4], 3);
    EXPECT_EQ(b[8], 0x20);  // 20000 = 0x4E20
    EXPECT_EQ(b[9], 0x4E);
    EXPECT_EQ(b[16], 0b1101);
    const auto d = decode_touch(b);
    ASSERT_TRUE(std::holds_alternative<TouchDatagram>(d));
    EXPECT_EQ(std::get<TouchDatagram>(d), (TouchDatagram{3, s}));
    EXPECT_TRUE(is_error(decode_touch({b.begin(), b.end() - 1}), DecodeError::BadLength));
}

// Reserved mask bits are ignored, like the reserved command flag bits.
TEST(Touch, HighMaskBitsIgnored) {
    auto b = encode_touch(0, {});
    b[16] = 0x13;
    const auto d = decode_touch(b);
    ASSERT_TRUE(std::holds_alternative<TouchDatagram>(d));
    EXPECT_EQ(std::get<TouchDatagram>(d).sample.quadrants, (std::array<bool, 4>{true, true, false, false}));
}

TEST(Phone, LayoutAndRoundTrip) {
    const PhoneEvent e{35'000'000, PhoneEventKind::Ring, "What is 7 x 8?"};
    const auto b = encode_phone(9, e);
    ASSERT_EQ(b.size(), kPhoneHeaderSize + e.question.size());
    EXPECT_EQ((Bytes{b.begin(), b.begin() + 4}), (Bytes{'P', 'H', '0', '1'}));
    EXPECT_EQ(b[16], 0);
    EXPECT_EQ(b[17], e.question.size());
    EXPECT_EQ(b[18], 0);
    const auto d = decode_phone(b);
    ASSERT_TRUE(std::holds_alternative<PhoneDatagram>(d));
    EXPECT_EQ(std::get<PhoneDatagram>(d), (PhoneDatagram{9, e}));
}

TEST(Phone, KindsAndErrors) {
    for (auto k : {PhoneEventKind::Pickup, PhoneEventKind::Touchscreen, PhoneEventKind::Putdown}) {
        const PhoneEvent e{5000, k, ""};
        const auto d = decode_phone(encode_phone(1, e));
        ASSERT_TRUE(std::holds_alternative<PhoneDatagram>(d));
        EXPECT_EQ(std::get<PhoneDatagram>(d).event, e);
    }
    auto b = encode_phone(1, {5000, PhoneEventKind::Ring, "abc"});
    b[16] = 9;
    EXPECT_TRUE(is_error(decode_phone(b), DecodeError::BadKind));
    b = encode_phone(1, {5000, PhoneEventKind::Ring, "abc"});
    b.pop_back();
    EXPECT_TRUE(is_error(decode_phone(b), DecodeError::BadLength));
    EXPECT_THROW(encode_phone(0, {0, PhoneEventKind::Ring, std::string(70000, 'x')}), std::length_error);
}
