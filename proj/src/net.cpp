#include "drivesim/net.hpp"

#include <atomic>
#include <charconv>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace drivesim {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using asio::ip::udp;

HostPort parse_host_port(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw std::invalid_argument("expected HOST:PORT, got '" + text + "'");
    unsigned port = 0;
    const char* first = text.data() + colon + 1;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, port);
    if (ec != std::errc{} || ptr != last || port > 65535)
        throw std::invalid_argument("bad port in '" + text + "'");
    return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

namespace {

template <typename Protocol>
typename Protocol::endpoint resolve(asio::io_context& io, const HostPort& hp) {
    typename Protocol::resolver r(io);
    auto results = r.resolve(hp.host, std::to_string(hp.port));
    for (const auto& e : results)
        if (e.endpoint().address().is_v4()) return e.endpoint();
    if (results.empty()) throw std::runtime_error("cannot resolve " + hp.host);
    return results.begin()->endpoint();
}

}  // namespace

// ---- UDP --------------------------------------------------------------------

struct UdpSender::Impl {
    asio::io_context io;
    udp::socket socket{io};
    udp::endpoint dest;
    std::atomic<std::uint64_t> errors{0};
};

UdpSender::UdpSender(const HostPort& dest) : impl_(std::make_unique<Impl>()) {
    impl_->dest = resolve<udp>(impl_->io, dest);
    impl_->socket.open(impl_->dest.protocol());
}

UdpSender::~UdpSender() = default;

void UdpSender::send(std::span<const std::uint8_t> datagram) {
    boost::system::error_code ec;
    impl_->socket.send_to(asio::buffer(datagram.data(), datagram.size()), impl_->dest, 0, ec);
    if (ec) ++impl_->errors;
}

std::uint64_t UdpSender::errors() const noexcept { return impl_->errors.load(); }

struct UdpReceiver::Impl {
    asio::io_context io;
    udp::socket socket{io};
};

UdpReceiver::UdpReceiver(const HostPort& bind) : impl_(std::make_unique<Impl>()) {
    const auto ep = resolve<udp>(impl_->io, bind);
    impl_->socket.open(ep.protocol());
    impl_->socket.set_option(udp::socket::reuse_address(true));
    impl_->socket.bind(ep);
}

UdpReceiver::~UdpReceiver() = default;

std::uint16_t UdpReceiver::port() const { return impl_->socket.local_endpoint().port(); }

std::vector<std::uint8_t> UdpReceiver::receive(int timeout_ms) {
    std::vector<std::uint8_t> buf(65536);
    std::size_t got = 0;
    bool done = false;
    udp::endpoint from;
    impl_->socket.async_receive_from(asio::buffer(buf), from,
                                     [&](const boost::system::error_code& ec, std::size_t n) {
                                         done = true;
                                         if (!ec) got = n;
                                     });
    impl_->io.restart();
    impl_->io.run_for(std::chrono::milliseconds(timeout_ms));
    if (!done) {
        impl_->socket.cancel();
        impl_->io.restart();
        impl_->io.run();
    }
    buf.resize(got);
    return buf;
}

// ---- WebSocket cockpit server ----------------------------------------------------

namespace {

class WsSession;

struct ServerState {
    asio::io_context io;
    tcp::acceptor acceptor{io};
    CockpitServer::MessageHandler on_message;
    CockpitServer::ConnectHandler on_connect;
    std::filesystem::path static_root;
    std::set<std::shared_ptr<WsSession>> sessions;  // io thread only
    std::atomic<std::size_t> client_count{0};
};

// Messages queued per client before new broadcasts are dropped for it.
constexpr std::size_t kMaxQueued = 64;

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(beast::tcp_stream stream, ServerState& server)
        : ws_(std::move(stream)), server_(server) {}

    void start(http::request<http::string_body> req) {
        beast::get_lowest_layer(ws_).expires_never();
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        // One JSON document per frame keeps minimal clients simple.
        ws_.auto_fragment(false);
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->server_.sessions.insert(self);
            ++self->server_.client_count;
            if (self->server_.on_connect) self->send(self->server_.on_connect());
            self->read();
        });
    }

    void send(std::string text) {
        if (closed_ || queue_.size() >= kMaxQueued) return;
        queue_.push_back(std::make_shared<const std::string>(std::move(text)));
        if (queue_.size() == 1) write();
    }

    // Pending operations complete with an error and release the session.
    void close() {
        drop();
        beast::get_lowest_layer(ws_).close();
    }

private:
    void read() {
        ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->drop();
            std::string msg = beast::buffers_to_string(self->buf_.data());
            self->buf_.consume(self->buf_.size());
            if (self->server_.on_message) {
                std::string reply = self->server_.on_message(msg);
                if (!reply.empty()) self->send(std::move(reply));
            }
            self->read();
        });
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(*queue_.front()),
                        [self = shared_from_this()](beast::error_code ec, std::size_t) {
                            if (ec || self->closed_) return self->drop();
                            self->queue_.pop_front();
                            if (!self->queue_.empty()) self->write();
                        });
    }

    void drop() {
        if (closed_) return;
        closed_ = true;
        if (server_.sessions.erase(shared_from_this())) --server_.client_count;
    }

    websocket::stream<beast::tcp_stream> ws_;
    ServerState& server_;
    beast::flat_buffer buf_;
    std::deque<std::shared_ptr<const std::string>> queue_;
    bool closed_ = false;
};

std::string_view mime_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket socket, ServerState& server)
        : stream_(std::move(socket)), server_(server) {}

    void start() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buf_, req_,
                         [self = shared_from_this()](beast::error_code ec, std::size_t) {
                             if (!ec) self->dispatch();
                         });
    }

private:
    void dispatch() {
        if (websocket::is_upgrade(req_)) {
            if (req_.target() == "/drive") {
                std::make_shared<WsSession>(std::move(stream_), server_)->start(std::move(req_));
                return;
            }
            return respond(http::status::not_found, "text/plain", "no such endpoint\n");
        }
        if (req_.method() != http::verb::get || server_.static_root.empty())
            return respond(http::status::not_found, "text/plain", "not found\n");

        std::string target(req_.target());
        if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
        if (target.empty() || target.back() == '/') target += "index.html";
        if (target.find("..") != std::string::npos)
            return respond(http::status::bad_request, "text/plain", "bad path\n");
        const auto path = server_.static_root / target.substr(1);
        std::ifstream in(path, std::ios::binary);
        if (!in) return respond(http::status::not_found, "text/plain", "not found\n");
        std::ostringstream body;
        body << in.rdbuf();
        respond(http::status::ok, mime_type(path), body.str());
    }

    void respond(http::status status, std::string_view type, std::string body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
        res->set(http::field::content_type, std::string(type));
        res->keep_alive(false);
        res->body() = std::move(body);
        res->prepare_payload();
        http::async_write(stream_, *res,
                          [self = shared_from_this(), res](beast::error_code, std::size_t) {
                              beast::error_code ignored;
                              self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          });
    }

    beast::tcp_stream stream_;
    ServerState& server_;
    beast::flat_buffer buf_;
    http::request<http::string_body> req_;
};

void accept_loop(ServerState& s) {
    s.acceptor.async_accept([&s](beast::error_code ec, tcp::socket socket) {
        if (ec) return;
        std::make_shared<HttpSession>(std::move(socket), s)->start();
        accept_loop(s);
    });
}

}  // namespace

struct CockpitServer::Impl {
    ServerState state;
    std::uint16_t port = 0;
    std::thread thread;
};

CockpitServer::CockpitServer(const HostPort& bind, MessageHandler on_message,
                             ConnectHandler on_connect, std::string static_root)
    : impl_(std::make_unique<Impl>()) {
    auto& s = impl_->state;
    s.on_message = std::move(on_message);
    s.on_connect = std::move(on_connect);
    s.static_root = std::move(static_root);
    const auto ep = resolve<tcp>(s.io, bind);
    s.acceptor.open(ep.protocol());
    s.acceptor.set_option(tcp::acceptor::reuse_address(true));
    s.acceptor.bind(ep);
    s.acceptor.listen();
    impl_->port = s.acceptor.local_endpoint().port();
    accept_loop(s);
    impl_->thread = std::thread([&s] { s.io.run(); });
}

CockpitServer::~CockpitServer() {
    auto& s = impl_->state;
    asio::post(s.io, [&s] {
        beast::error_code ignored;
        s.acceptor.close(ignored);
        auto sessions = s.sessions;
        for (const auto& session : sessions) session->close();
    });
    asio::post(s.io, [&s] { s.io.stop(); });
    impl_->thread.join();
}

std::uint16_t CockpitServer::port() const { return impl_->port; }

void CockpitServer::broadcast(std::string text) {
    auto& s = impl_->state;
    asio::post(s.io, [&s, msg = std::move(text)] {
        for (const auto& session : s.sessions) session->send(msg);
    });
}

std::size_t CockpitServer::client_count() const { return impl_->state.client_count.load(); }

}  // namespace drivesim
