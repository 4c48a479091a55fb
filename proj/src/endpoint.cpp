#include "drivesim/endpoint.hpp"

#include <json.hpp>

namespace drivesim {

std::string EndpointReport::to_json() const {
    nlohmann::ordered_json j;
    j["received"] = received;
    j["gaps"] = gaps;
    j["crc_errors"] = crc_errors;
    j["attitude"] = {attitude[0], attitude[1], attitude[2], attitude[3]};
    j["estopped"] = estopped;
    return j.dump();
}

std::optional<DecodeError> PlatformEndpoint::ingest(std::span<const std::uint8_t> datagram) {
    auto decoded = decode_command(datagram);
    if (auto* err = std::get_if<DecodeError>(&decoded)) {
        if (*err == DecodeError::BadCrc)
            ++report_.crc_errors;
        else
            ++report_.malformed;
        return *err;
    }
    apply(std::get<PlatformCommand>(decoded));
    return std::nullopt;
}

void PlatformEndpoint::apply(const PlatformCommand& cmd) {
    auto& r = report_;
    ++r.received;
    if (r.last_seq) {
        if (cmd.seq > *r.last_seq) {
            r.gaps += cmd.seq - *r.last_seq - 1;
        } else {
            ++r.out_of_order;
        }
    } else {
        r.gaps += cmd.seq;  // a stream is expected to start at seq 0
    }
    if (!r.last_seq || cmd.seq > *r.last_seq) r.last_seq = cmd.seq;

    if (cmd.flags.estop) {
        r.estopped = true;
    } else if (r.estopped && cmd.flags.motion_enabled) {
        r.estopped = false;
    }
    if (r.estopped) {
        r.attitude = {0.0f, 0.0f, 0.0f, 0.0f};
    } else {
        r.attitude = {cmd.pitch, cmd.roll, cmd.yaw, cmd.heave};
    }
}

}  // namespace drivesim
