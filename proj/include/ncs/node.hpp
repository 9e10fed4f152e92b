#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncs/channel.hpp"
#include "ncs/controller.hpp"
#include "ncs/plant.hpp"
#include "ncs/sim.hpp"

namespace ncs {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// Parse "host:port". Throws ConfigError on a malformed string.
Endpoint parse_endpoint(const std::string& text, const std::string& field);

enum class NodeRole { plant_master, controller_slave };

struct NodeConfig {
    Endpoint bind;
    Endpoint peer;
    NodeRole role = NodeRole::plant_master;
    SimConfig sim;
    PlantParams plant;
    PiGains gains;
    ChannelConfig channel;
    double sync_timeout = 5.0; // wall-clock seconds
};

/// Thin RAII wrapper over a bound UDP socket with deadline receives.
class UdpSocket {
public:
    explicit UdpSocket(const Endpoint& bind_to);
    ~UdpSocket();
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    void send_to(const Endpoint& peer, std::span<const std::uint8_t> bytes);
    /// Blocks up to `timeout`; empty result on deadline.
    std::optional<std::vector<std::uint8_t>> recv(std::chrono::milliseconds timeout);
    std::uint16_t local_port() const;

private:
    int fd_ = -1;
};

struct PlantNodeResult {
    Trace trace;
    EventLog events;
    int control_misses = 0; // periods where no CONTROL reply arrived in budget
    std::vector<double> delivered_control_stamps;
};

struct ControllerNodeResult {
    Trace trace;
    int ooo_discards = 0;
    std::vector<double> delivered_sensor_stamps;
};

/// Master: paces the loop at real Ts, advances the local plant, pushes sensor
/// samples through the software impairment channel before sending them as
/// datagrams, emits one TICK per period, and lock-steps on the CONTROL reply.
/// Received control values pass through the local controller->actuator
/// impairment channel before reaching the zero-order-hold actuator. Throws
/// HandshakeError when the controller never answers the first period.
PlantNodeResult run_plant_node(const NodeConfig& cfg);

/// Slave: blocks for TICK datagrams, feeds SENSOR datagrams through the
/// out-of-order filter, runs the PI step once per TICK and replies with a
/// CONTROL datagram until DONE. Throws RtError when the master goes silent
/// for longer than sync_timeout.
ControllerNodeResult run_controller_node(const NodeConfig& cfg);

} // namespace ncs
