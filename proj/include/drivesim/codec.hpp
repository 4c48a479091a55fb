#pragma once

// Wire formats. All multi-byte fields are little-endian.
//
// Platform command (38 bytes):
//   0  magic "FD01"      4
//   4  version = 1       1
//   5  flags             1   bit0 shake_active, bit1 estop, bit2 motion_enabled
//   6  seq      u32      4
//  10  t_us     u64      8
//  18  pitch, roll, yaw, heave   4 x f32
//  34  crc32 over bytes 0..33    4   (IEEE 802.3, reflected)
//
// Touch sample (17 bytes): "TS01", seq u32, t_us u64, quadrant mask u8 (bit0 = Q1).
// Phone event: "PH01", seq u32, t_us u64, kind u8, question_len u16, question bytes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drivesim/driver_monitor.hpp"
#include "drivesim/platform.hpp"

namespace drivesim {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kCommandSize = 38;
inline constexpr std::uint8_t kCommandVersion = 1;
inline constexpr std::size_t kTouchDatagramSize = 17;
inline constexpr std::size_t kPhoneHeaderSize = 19;

/// CRC-32 (polynomial 0xEDB88320 reflected, init and xorout 0xFFFFFFFF).
std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept;

enum class DecodeError { BadMagic, BadLength, BadVersion, BadCrc, BadKind };

const char* to_string(DecodeError e) noexcept;

template <typename T>
using Decoded = std::variant<T, DecodeError>;

Bytes encode_command(const PlatformCommand& cmd);

/// Length is checked first, then magic, version, and CRC.
Decoded<PlatformCommand> decode_command(std::span<const std::uint8_t> bytes);

struct TouchDatagram {
    std::uint32_t seq = 0;
    TouchSample sample;

    bool operator==(const TouchDatagram&) const = default;
};

struct PhoneDatagram {
    std::uint32_t seq = 0;
    PhoneEvent event;

    bool operator==(const PhoneDatagram&) const = default;
};

Bytes encode_touch(std::uint32_t seq, const TouchSample& sample);
Decoded<TouchDatagram> decode_touch(std::span<const std::uint8_t> bytes);

/// Throws std::length_error if the question exceeds 65535 bytes.
Bytes encode_phone(std::uint32_t seq, const PhoneEvent& event);
Decoded<PhoneDatagram> decode_phone(std::span<const std::uint8_t> bytes);

}  // namespace drivesim
