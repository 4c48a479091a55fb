// simrun: runs a scenario through the 200 Hz loop and writes the run
// directory. Inputs come from a script (--input), the cockpit WebSocket
// (--live), or default to a hands-off driver.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "drivesim/bridge.hpp"
#include "drivesim/codec.hpp"
#include "drivesim/endpoint.hpp"
#include "drivesim/net.hpp"
#include "drivesim/telemetry.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::string read_text(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string s;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) s.append(buf, n);
    std::fclose(f);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace drivesim;

    CLI::App app{"Run a driving-simulator scenario"};
    std::string scenario_path;
    std::string input_path;
    std::string out_dir;
    std::string platform_addr;
    std::string touch_addr;
    std::string phone_addr;
    std::string ws_host = "127.0.0.1";
    std::string ui_dir = "cockpit-ui/dist";
    std::uint16_t ws_port = kCockpitPort;
    double duration = 10.0;
    bool live = false;
    bool realtime = false;
    std::optional<std::uint64_t> seed;

    app.add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    auto* dur = app.add_option("--duration", duration, "Run length in seconds");
    auto* input = app.add_option("--input", input_path, "Input script (input.csv layout)")
                      ->check(CLI::ExistingFile);
    auto* live_flag = app.add_flag("--live", live, "Drive from the cockpit WebSocket");
    input->excludes(live_flag);
    app.add_flag("--realtime", realtime, "Pace ticks against the wall clock");
    app.add_option("--out", out_dir, "Run directory to write")->required();
    app.add_option("--platform-addr", platform_addr, "Send platform commands to HOST:PORT");
    app.add_option("--touch-addr", touch_addr, "Send touch datagrams to HOST:PORT");
    app.add_option("--phone-addr", phone_addr, "Send phone datagrams to HOST:PORT");
    app.add_option("--seed", seed, "Override the scenario seed");
    app.add_option("--ws-host", ws_host, "Cockpit bind address")->needs(live_flag);
    app.add_option("--ws-port", ws_port, "Cockpit WebSocket port")->needs(live_flag);
    auto* serve = app.add_option("--serve-ui", ui_dir, "Serve cockpit static files from DIR")
                      ->expected(0, 1)
                      ->needs(live_flag);
    CLI11_PARSE(app, argc, argv);

    try {
        const std::string doc = read_text(scenario_path);
        const Scenario scenario = load_scenario(doc);

        LoopConfig config;
        config.seed = seed;
        config.realtime = realtime || live;
        // A live session runs until interrupted unless a duration is given.
        config.duration = (live && dur->count() == 0) ? 24.0 * 3600.0 : duration;
        config.tick_count();

        std::unique_ptr<UdpSender> platform_tx, touch_tx, phone_tx;
        if (!platform_addr.empty()) platform_tx = std::make_unique<UdpSender>(parse_host_port(platform_addr));
        if (!touch_addr.empty()) touch_tx = std::make_unique<UdpSender>(parse_host_port(touch_addr));
        if (!phone_addr.empty()) phone_tx = std::make_unique<UdpSender>(parse_host_port(phone_addr));

        PlatformEndpoint endpoint;
        std::uint32_t touch_seq = 0;
        std::uint32_t phone_seq = 0;
        RunHooks hooks;
        hooks.platform = [&](std::span<const std::uint8_t> packet) {
            endpoint.ingest(packet);
            if (platform_tx) platform_tx->send(packet);
        };
        if (touch_tx)
            hooks.touch = [&](const TouchSample& s) { touch_tx->send(encode_touch(touch_seq++, s)); };
        if (phone_tx)
            hooks.phone = [&](const PhoneEvent& e) { phone_tx->send(encode_phone(phone_seq++, e)); };
        hooks.stop_requested = [] { return g_stop.load(); };
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);

        std::unique_ptr<InputSource> source;
        std::unique_ptr<InputMailbox> mailbox;
        std::unique_ptr<CockpitServer> server;
        std::array<bool, 4> last_touch{};
        if (live) {
            mailbox = std::make_unique<InputMailbox>();
            source = std::make_unique<LiveInput>(*mailbox);
            server = std::make_unique<CockpitServer>(
                HostPort{ws_host, ws_port},
                [&](const std::string& text) { return handle_input_frame(text, *mailbox); },
                [&] { return world_to_json(scenario); }, serve->count() ? ui_dir : std::string{});
            hooks.on_tick = [&](const TickFrame& f) {
                if (f.touch) last_touch = f.touch->quadrants;
                if ((f.index + 1) % kSnapshotEveryTicks == 0)
                    server->broadcast(snapshot_to_json(make_snapshot(f, last_touch)));
            };
            std::cerr << "cockpit listening on ws://" << ws_host << ":" << server->port() << "/drive\n";
        } else if (!input_path.empty()) {
            source = load_input_script(input_path);
        } else {
            source = std::make_unique<ConstantInput>(DriverInput{});
        }

        RunLog log = run(scenario, doc, config, *source, hooks);
        server.reset();
        write_log(log, out_dir);

        nlohmann::json summary{{"out", out_dir},
                               {"ticks", log.vehicle.size()},
                               {"clamped_inputs", source->clamped_count()},
                               {"endpoint", nlohmann::json::parse(endpoint.report().to_json())}};
        if (platform_tx) summary["platform_send_errors"] = platform_tx->errors();
        std::cout << summary.dump(2) << "\n";
    } catch (const InputExhausted& e) {
        std::cerr << "simrun: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "simrun: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
