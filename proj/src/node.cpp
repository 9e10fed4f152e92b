#include "ncs/node.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

#include "ncs/error.hpp"
#include "ncs/rng.hpp"
#include "ncs/wire.hpp"

namespace ncs {

namespace {

using Clock = std::chrono::steady_clock;

sockaddr_in resolve(const Endpoint& ep, const std::string& what) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(ep.port);
    const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res);
    if (rc != 0 || res == nullptr) {
        throw RtError("cannot resolve " + what + " address " + ep.host + ": " +
                      gai_strerror(rc));
    }
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof(addr));
    ::freeaddrinfo(res);
    return addr;
}

std::chrono::milliseconds remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return left.count() > 0 ? left : std::chrono::milliseconds(0);
}

} // namespace

Endpoint parse_endpoint(const std::string& text, const std::string& field) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
        throw ConfigError(field, "expected host:port, got '" + text + "'");
    }
    Endpoint ep;
    ep.host = text.substr(0, colon);
    const std::string port_text = text.substr(colon + 1);
    char* end = nullptr;
    const long port = std::strtol(port_text.c_str(), &end, 10);
    if (end == port_text.c_str() || *end != '\0' || port < 0 || port > 65535) {
        throw ConfigError(field, "invalid port '" + port_text + "'");
    }
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

UdpSocket::UdpSocket(const Endpoint& bind_to) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) {
        throw RtError(std::string("socket: ") + std::strerror(errno));
    }
    sockaddr_in addr = resolve(bind_to, "bind");
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const std::string msg = std::strerror(errno);
        ::close(fd_);
        fd_ = -1;
        throw RtError("bind " + bind_to.host + ":" + std::to_string(bind_to.port) + ": " + msg);
    }
}

UdpSocket::~UdpSocket() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void UdpSocket::send_to(const Endpoint& peer, std::span<const std::uint8_t> bytes) {
    sockaddr_in addr = resolve(peer, "peer");
    const auto sent = ::sendto(fd_, bytes.data(), bytes.size(), 0,
                               reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    if (sent < 0 && errno != ECONNREFUSED) {
        throw RtError(std::string("sendto: ") + std::strerror(errno));
    }
}

std::optional<std::vector<std::uint8_t>> UdpSocket::recv(std::chrono::milliseconds timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> buf(512);
    const auto got = ::recvfrom(fd_, buf.data(), buf.size(), 0, nullptr, nullptr);
    if (got < 0) {
        if (errno == ECONNREFUSED || errno == EAGAIN || errno == EINTR) {
            return std::nullopt;
        }
        throw RtError(std::string("recvfrom: ") + std::strerror(errno));
    }
    buf.resize(static_cast<std::size_t>(got));
    return buf;
}

std::uint16_t UdpSocket::local_port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
}

namespace {

void log_malformed(const char* node, const std::string& reason) {
    std::fprintf(stderr, "[%s] malformed datagram ignored: %s\n", node, reason.c_str());
}

void send_packet(UdpSocket& sock, const Endpoint& peer, const WirePacket& pkt) {
    const auto bytes = encode_wire(pkt);
    sock.send_to(peer, bytes);
}

} // namespace

PlantNodeResult run_plant_node(const NodeConfig& cfg) {
    const std::uint64_t n_periods = validate_sim_config(cfg.sim);
    if (!(cfg.sync_timeout > 0.0)) {
        throw ConfigError("rt.sync_timeout", "must be positive");
    }
    const double ts = cfg.sim.control_period;
    const double tick = cfg.sim.tick();
    const auto ticks_per_period = static_cast<std::uint64_t>(cfg.sim.tick_divisor);
    const auto budget =
        std::chrono::milliseconds(static_cast<long>(cfg.sync_timeout * 1000.0));
    const auto period_wall = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(ts));

    UdpSocket sock(cfg.bind);
    Plant process(cfg.plant, tick);
    Channel chan_sc(cfg.channel, tick, Pcg32(cfg.sim.seed, rng_stream::kSensorChannel));
    Channel chan_ca(cfg.channel, tick, Pcg32(cfg.sim.seed, rng_stream::kControlChannel));
    OooFilter filter_ca(cfg.channel.ooo_buffer_cap);

    PlantNodeResult result;
    result.trace.sample_period = ts;
    result.trace.horizon = cfg.sim.horizon;

    double u_applied = 0.0;
    double last_ctrl_value = 0.0;
    Clock::time_point pace_anchor{};

    for (std::uint64_t k = 0; k <= n_periods; ++k) {
        if (k > 0) {
            // Pace at real Ts, anchored after the handshake period. Falls
            // through immediately when behind.
            std::this_thread::sleep_until(pace_anchor + k * period_wall);
        }
        const std::uint64_t j = k * ticks_per_period;
        const double tk = static_cast<double>(k) * ts;

        // Actuator: software channel release, then order filter.
        for (const Packet& pkt : chan_ca.tick(j)) {
            if (auto evicted = filter_ca.insert(pkt)) {
                chan_ca.mark_discarded(evicted->seq);
            }
        }
        OooEmit act = filter_ca.emit();
        for (const Packet& pkt : act.discarded) {
            chan_ca.mark_discarded(pkt.seq);
        }
        if (act.passed) {
            u_applied = act.passed->value;
            result.delivered_control_stamps.push_back(act.passed->stamp);
        }

        const double yk = process.output();
        if (!std::isfinite(yk)) {
            result.trace.diverged = true;
            result.trace.t_diverged = tk;
            break;
        }

        // Flush impaired sensor packets due by now, then stage this sample.
        // The flush precedes the push, so a zero-delay packet still needs a
        // full period to cross - same minimum latency as the simulation.
        for (const Packet& pkt : chan_sc.tick(j)) {
            send_packet(sock, cfg.peer, {WireKind::sensor, pkt.seq, pkt.stamp, pkt.value});
        }
        chan_sc.push({k, tk, yk}, j);

        send_packet(sock, cfg.peer, {WireKind::tick, k, tk, 0.0});

        // Lock-step: wait for this period's CONTROL reply within the budget.
        const auto deadline = Clock::now() + budget;
        auto next_retry = Clock::now() + std::chrono::milliseconds(50);
        bool got_control = false;
        double uk = last_ctrl_value;
        while (Clock::now() < deadline) {
            auto wait = remaining_ms(deadline);
            if (k == 0) {
                // Re-offer TICK 0 until the controller comes up.
                wait = std::min(wait, remaining_ms(next_retry));
            }
            auto bytes = sock.recv(wait);
            if (!bytes) {
                if (k == 0 && Clock::now() >= next_retry) {
                    send_packet(sock, cfg.peer, {WireKind::tick, 0, 0.0, 0.0});
                    next_retry = Clock::now() + std::chrono::milliseconds(50);
                }
                continue;
            }
            WireDecode decoded = decode_wire(*bytes);
            if (!decoded.packet) {
                log_malformed("plant", decoded.error);
                continue;
            }
            if (decoded.packet->kind == WireKind::control && decoded.packet->seq == k) {
                uk = decoded.packet->value;
                got_control = true;
                break;
            }
            // Stale replies and unexpected kinds are ignored.
        }

        if (got_control) {
            if (!std::isfinite(uk)) {
                // The remote controller diverged; stop the run cleanly.
                result.trace.diverged = true;
                result.trace.t_diverged = tk;
                break;
            }
            last_ctrl_value = uk;
            chan_ca.push({k, tk, uk}, j);
        } else {
            if (k == 0) {
                throw HandshakeError("no controller response within sync timeout");
            }
            ++result.control_misses;
        }

        result.trace.rows.push_back({tk, cfg.sim.setpoint, yk, uk, cfg.sim.setpoint - yk});

        if (k == 0) {
            pace_anchor = Clock::now();
        }
        if (k < n_periods) {
            for (std::uint64_t i = 0; i < ticks_per_period; ++i) {
                process.step(u_applied);
            }
        }
    }

    for (int i = 0; i < 3; ++i) {
        send_packet(sock, cfg.peer, {WireKind::done, n_periods, cfg.sim.horizon, 0.0});
    }

    for (const ChannelEvent& ev : chan_sc.events()) {
        result.events.rows.push_back(
            {ev.seq, ChannelId::sensor_to_ctrl, ev.t_send, ev.delay, ev.dropped, ev.discarded_ooo});
    }
    for (const ChannelEvent& ev : chan_ca.events()) {
        result.events.rows.push_back(
            {ev.seq, ChannelId::ctrl_to_act, ev.t_send, ev.delay, ev.dropped, ev.discarded_ooo});
    }
    return result;
}

ControllerNodeResult run_controller_node(const NodeConfig& cfg) {
    validate_sim_config(cfg.sim);
    if (!(cfg.sync_timeout > 0.0)) {
        throw ConfigError("rt.sync_timeout", "must be positive");
    }
    const double ts = cfg.sim.control_period;
    const auto budget =
        std::chrono::milliseconds(static_cast<long>(cfg.sync_timeout * 1000.0));

    UdpSocket sock(cfg.bind);
    OooFilter filter_sc(cfg.channel.ooo_buffer_cap);
    PiState ctrl;

    ControllerNodeResult result;
    result.trace.sample_period = ts;
    result.trace.horizon = cfg.sim.horizon;

    bool saw_tick = false;
    std::uint64_t last_tick = 0;
    WirePacket cached_control{WireKind::control, 0, 0.0, 0.0};

    auto deadline = Clock::now() + budget;
    while (true) {
        auto bytes = sock.recv(remaining_ms(deadline));
        if (!bytes) {
            throw RtError(saw_tick ? "master went silent beyond sync timeout"
                                   : "no TICK within sync timeout");
        }
        WireDecode decoded = decode_wire(*bytes);
        if (!decoded.packet) {
            log_malformed("controller", decoded.error);
            continue;
        }
        deadline = Clock::now() + budget;
        const WirePacket& pkt = *decoded.packet;

        switch (pkt.kind) {
        case WireKind::sensor: {
            if (auto evicted = filter_sc.insert({pkt.seq, pkt.stamp, pkt.value})) {
                (void)evicted;
                ++result.ooo_discards;
            }
            break;
        }
        case WireKind::tick: {
            if (saw_tick && pkt.seq < last_tick) {
                break; // stale interrupt
            }
            if (saw_tick && pkt.seq == last_tick) {
                // Duplicate TICK: the reply may have been lost, repeat it.
                send_packet(sock, cfg.peer, cached_control);
                break;
            }
            saw_tick = true;
            last_tick = pkt.seq;
            const double tk = static_cast<double>(pkt.seq) * ts;

            OooEmit meas = filter_sc.emit();
            result.ooo_discards += static_cast<int>(meas.discarded.size());
            if (meas.passed) {
                ctrl.last_input = meas.passed->value;
                result.delivered_sensor_stamps.push_back(meas.passed->stamp);
            }
            const double e_ctrl = cfg.sim.setpoint - ctrl.last_input;
            const double uk = pi_step(ctrl, cfg.gains, e_ctrl, ts);
            cached_control = {WireKind::control, pkt.seq, tk, uk};
            // Always reply (the master decides when to stop), but keep
            // non-finite samples out of the local trace.
            send_packet(sock, cfg.peer, cached_control);
            if (!result.trace.diverged) {
                if (std::isfinite(uk) && std::isfinite(ctrl.last_input)) {
                    result.trace.rows.push_back(
                        {tk, cfg.sim.setpoint, ctrl.last_input, uk, e_ctrl});
                } else {
                    result.trace.diverged = true;
                    result.trace.t_diverged = tk;
                }
            }
            break;
        }
        case WireKind::done:
            return result;
        case WireKind::control:
            break; // not addressed to us
        }
    }
}

} // namespace ncs
