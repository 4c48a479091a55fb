#pragma once

// Network transports: UDP datagram links for the platform command and
// driver-monitor streams, and the cockpit WebSocket server.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace drivesim {

inline constexpr std::uint16_t kPlatformPort = 47001;
inline constexpr std::uint16_t kTouchPort = 47002;
inline constexpr std::uint16_t kPhonePort = 47003;
inline constexpr std::uint16_t kCockpitPort = 47010;

struct HostPort {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// Parses "HOST:PORT". Throws std::invalid_argument.
HostPort parse_host_port(const std::string& text);

/// Fire-and-forget UDP sender. Send errors are counted, never thrown.
class UdpSender {
public:
    explicit UdpSender(const HostPort& dest);
    ~UdpSender();
    UdpSender(const UdpSender&) = delete;
    UdpSender& operator=(const UdpSender&) = delete;

    void send(std::span<const std::uint8_t> datagram);
    std::uint64_t errors() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blocking UDP receiver bound to one port (0 picks an ephemeral port).
class UdpReceiver {
public:
    explicit UdpReceiver(const HostPort& bind);
    ~UdpReceiver();
    UdpReceiver(const UdpReceiver&) = delete;
    UdpReceiver& operator=(const UdpReceiver&) = delete;

    std::uint16_t port() const;

    /// Waits up to timeout_ms for one datagram; empty on timeout.
    std::vector<std::uint8_t> receive(int timeout_ms);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// WebSocket server for the cockpit at ws://HOST:PORT/drive. Text frames are
/// handed to `on_message`; its return value (if non-empty) is sent back to
/// that client. broadcast() is thread-safe and never blocks the caller.
/// Plain HTTP GETs are answered from `static_root` when it is set.
class CockpitServer {
public:
    using MessageHandler = std::function<std::string(const std::string&)>;
    using ConnectHandler = std::function<std::string()>;

    CockpitServer(const HostPort& bind, MessageHandler on_message,
                  ConnectHandler on_connect = {}, std::string static_root = {});
    ~CockpitServer();
    CockpitServer(const CockpitServer&) = delete;
    CockpitServer& operator=(const CockpitServer&) = delete;

    std::uint16_t port() const;
    void broadcast(std::string text);
    std::size_t client_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace drivesim
