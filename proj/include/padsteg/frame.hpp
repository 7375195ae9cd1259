#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "padsteg/address.hpp"
#include "padsteg/bytes.hpp"

namespace padsteg {

inline constexpr std::size_t kEthernetHeaderLen = 14;
inline constexpr std::size_t kMinDataField = 46;
// Minimum wire length without FCS.
inline constexpr std::size_t kMinFrameLen = kEthernetHeaderLen + kMinDataField;

inline constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
inline constexpr std::uint16_t kEtherTypeArp = 0x0806;
inline constexpr std::uint16_t kEtherTypeIpv6 = 0x86DD;

enum class Carrier : std::uint8_t { TCP, ARP, ICMP, UDP, Other };

inline constexpr Carrier kAllCarriers[] = {Carrier::TCP, Carrier::ARP, Carrier::ICMP,
                                          Carrier::UDP, Carrier::Other};

std::string_view carrier_name(Carrier c);
/// Case-insensitive; "tcp", "arp", "icmp", "udp", "other".
std::optional<Carrier> parse_carrier(std::string_view name);

constexpr std::size_t compute_padding_length(std::size_t payload_len) {
    return payload_len >= kMinDataField ? 0 : kMinDataField - payload_len;
}

struct EthernetFrame {
    MacAddress dst;
    MacAddress src;
    std::uint16_t ethertype = 0;
    Bytes payload;  // upper-layer PDU, exact length
    Bytes padding;
    // Set by decode_frame for 60-byte frames whose ethertype gives no length.
    bool boundary_unknown = false;

    std::size_t wire_length() const { return kEthernetHeaderLen + payload.size() + padding.size(); }

    bool operator==(const EthernetFrame&) const = default;
};

/// Builds a frame with zero padding of the correct length.
EthernetFrame make_frame(MacAddress dst, MacAddress src, std::uint16_t ethertype, Bytes payload);

/// Throws StructuralError if padding length != compute_padding_length(payload length).
Bytes encode_frame(const EthernetFrame& frame);

/// Splits payload from padding using the upper-layer length.
/// Throws TruncatedFrame (< 60 bytes) or MalformedFrame.
EthernetFrame decode_frame(ByteView bytes);

Carrier classify_carrier(const EthernetFrame& frame);

}  // namespace padsteg
