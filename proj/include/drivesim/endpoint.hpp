#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "drivesim/codec.hpp"
#include "drivesim/platform.hpp"

namespace drivesim {

struct EndpointReport {
    std::uint64_t received = 0;  ///< valid packets
    std::uint64_t gaps = 0;      ///< missing sequence numbers
    std::uint64_t out_of_order = 0;
    std::uint64_t crc_errors = 0;
    std::uint64_t malformed = 0;  ///< bad magic, length, or version
    std::array<float, 4> attitude{};  ///< pitch, roll, yaw, heave
    bool estopped = false;
    std::optional<std::uint32_t> last_seq;

    /// {"received","gaps","crc_errors","attitude","estopped"}
    std::string to_json() const;
};

/// Simulated platform control computer. Tracks the last valid command and
/// the stream's health. Once a packet with the estop flag arrives the
/// attitude is held neutral until a packet with estop clear and
/// motion_enabled set.
class PlatformEndpoint {
public:
    /// Decodes and applies one datagram. Decode failures are counted, never
    /// thrown. Returns the decode error, if any.
    std::optional<DecodeError> ingest(std::span<const std::uint8_t> datagram);

    void apply(const PlatformCommand& cmd);

    const EndpointReport& report() const noexcept { return report_; }

private:
    EndpointReport report_;
};

}  // namespace drivesim
