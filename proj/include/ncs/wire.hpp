#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace ncs {

enum class WireKind : std::uint8_t {
    tick = 0,    // master's per-period sync signal, seq = period index
    sensor = 1,  // plant output sample
    control = 2, // controller output sample
    done = 3,    // end of horizon
};

/// Fixed 28-byte datagram: magic "NC", version, kind, then seq (u64),
/// stamp (f64 seconds) and value (f64), all little-endian.
struct WirePacket {
    WireKind kind = WireKind::tick;
    std::uint64_t seq = 0;
    double stamp = 0.0;
    double value = 0.0;
};

inline constexpr std::size_t kWireSize = 28;
inline constexpr std::uint8_t kWireMagic0 = 0x4E;
inline constexpr std::uint8_t kWireMagic1 = 0x43;
inline constexpr std::uint8_t kWireVersion = 1;

std::array<std::uint8_t, kWireSize> encode_wire(const WirePacket& pkt);

struct WireDecode {
    std::optional<WirePacket> packet;
    std::string error; // reason when packet is empty (length, magic, version, kind)
};

WireDecode decode_wire(std::span<const std::uint8_t> bytes);

} // namespace ncs
