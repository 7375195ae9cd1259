#pragma once

#include <cstdint>

#include "padsteg/address.hpp"
#include "padsteg/bytes.hpp"

namespace padsteg {

inline constexpr std::size_t kArpPacketLen = 28;

enum class ArpOp : std::uint16_t { Request = 1, Reply = 2 };

// Field layout follows RFC 826 for Ethernet/IPv4.
struct ArpPacket {
    std::uint16_t htype = 1;
    std::uint16_t ptype = 0x0800;
    std::uint8_t hlen = 6;
    std::uint8_t plen = 4;
    std::uint16_t oper = static_cast<std::uint16_t>(ArpOp::Request);
    MacAddress sha;
    Ipv4Address spa;
    MacAddress tha;
    Ipv4Address tpa;

    bool is_request() const { return oper == static_cast<std::uint16_t>(ArpOp::Request); }
    bool is_reply() const { return oper == static_cast<std::uint16_t>(ArpOp::Reply); }
    /// oper outside {Request, Reply}; still parsed for analysis.
    bool non_standard() const { return !is_request() && !is_reply(); }
    bool is_gratuitous() const { return is_request() && spa == tpa; }

    bool operator==(const ArpPacket&) const = default;
};

ArpPacket make_arp_request(MacAddress sha, Ipv4Address spa, Ipv4Address tpa);
ArpPacket make_arp_reply(MacAddress sha, Ipv4Address spa, MacAddress tha, Ipv4Address tpa);

Bytes encode_arp(const ArpPacket& p);
/// Requires exactly 28 bytes; throws MalformedFrame otherwise.
ArpPacket decode_arp(ByteView bytes);

}  // namespace padsteg
