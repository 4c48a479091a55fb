// simendpoint: stand-in for the motion platform's control computer.
// Listens for command packets and prints the stream report on exit.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "drivesim/endpoint.hpp"
#include "drivesim/net.hpp"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated motion-platform endpoint"};
    std::string bind = "127.0.0.1:" + std::to_string(drivesim::kPlatformPort);
    std::uint64_t count = 0;
    double idle = 0.0;
    app.add_option("--bind", bind, "HOST:PORT to listen on");
    app.add_option("--count", count, "Exit after this many datagrams (0 = unlimited)");
    app.add_option("--idle-timeout", idle, "Exit after this many idle seconds (0 = never)");
    CLI11_PARSE(app, argc, argv);

    try {
        drivesim::UdpReceiver rx(drivesim::parse_host_port(bind));
        drivesim::PlatformEndpoint endpoint;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "listening on udp port " << rx.port() << "\n";

        std::uint64_t seen = 0;
        auto last = std::chrono::steady_clock::now();
        while (!g_stop && (count == 0 || seen < count)) {
            auto packet = rx.receive(100);
            const auto now = std::chrono::steady_clock::now();
            if (packet.empty()) {
                if (idle > 0 && std::chrono::duration<double>(now - last).count() >= idle) break;
                continue;
            }
            last = now;
            ++seen;
            endpoint.ingest(packet);
        }
        std::cout << endpoint.report().to_json() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "simendpoint: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
