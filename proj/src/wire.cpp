#include "ncs/wire.hpp"

#include <bit>

namespace ncs {

namespace {

void put_u64_le(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
}

std::uint64_t get_u64_le(const std::uint8_t* in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    }
    return v;
}

} // namespace

std::array<std::uint8_t, kWireSize> encode_wire(const WirePacket& pkt) {
    std::array<std::uint8_t, kWireSize> out{};
    out[0] = kWireMagic0;
    out[1] = kWireMagic1;
    out[2] = kWireVersion;
    out[3] = static_cast<std::uint8_t>(pkt.kind);
    put_u64_le(&out[4], pkt.seq);
    put_u64_le(&out[12], std::bit_cast<std::uint64_t>(pkt.stamp));
    put_u64_le(&out[20], std::bit_cast<std::uint64_t>(pkt.value));
    return out;
}

WireDecode decode_wire(std::span<const std::uint8_t> bytes) {
    WireDecode result;
    if (bytes.size() != kWireSize) {
        result.error = "bad length " + std::to_string(bytes.size()) + " (want " +
                       std::to_string(kWireSize) + ")";
        return result;
    }
    if (bytes[0] != kWireMagic0 || bytes[1] != kWireMagic1) {
        result.error = "bad magic";
        return result;
    }
    if (bytes[2] != kWireVersion) {
        result.error = "bad version " + std::to_string(bytes[2]);
        return result;
    }
    if (bytes[3] > static_cast<std::uint8_t>(WireKind::done)) {
        result.error = "unknown kind " + std::to_string(bytes[3]);
        return result;
    }
    WirePacket pkt;
    pkt.kind = static_cast<WireKind>(bytes[3]);
    pkt.seq = get_u64_le(&bytes[4]);
    pkt.stamp = std::bit_cast<double>(get_u64_le(&bytes[12]));
    pkt.value = std::bit_cast<double>(get_u64_le(&bytes[20]));
    result.packet = pkt;
    return result;
}

} // namespace ncs
