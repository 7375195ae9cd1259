#include "padsteg/arp.hpp"

#include <string>

#include "padsteg/error.hpp"

namespace padsteg {

ArpPacket make_arp_request(MacAddress sha, Ipv4Address spa, Ipv4Address tpa) {
    ArpPacket p;
    p.oper = static_cast<std::uint16_t>(ArpOp::Request);
    p.sha = sha;
    p.spa = spa;
    p.tpa = tpa;
    return p;
}

ArpPacket make_arp_reply(MacAddress sha, Ipv4Address spa, MacAddress tha, Ipv4Address tpa) {
    ArpPacket p;
    p.oper = static_cast<std::uint16_t>(ArpOp::Reply);
    p.sha = sha;
    p.spa = spa;
    p.tha = tha;
    p.tpa = tpa;
    return p;
}

Bytes encode_arp(const ArpPacket& p) {
    Bytes out;
    out.reserve(kArpPacketLen);
    append_be16(out, p.htype);
    append_be16(out, p.ptype);
    out.push_back(p.hlen);
    out.push_back(p.plen);
    append_be16(out, p.oper);
    out.insert(out.end(), p.sha.octets.begin(), p.sha.octets.end());
    out.insert(out.end(), p.spa.octets.begin(), p.spa.octets.end());
    out.insert(out.end(), p.tha.octets.begin(), p.tha.octets.end());
    out.insert(out.end(), p.tpa.octets.begin(), p.tpa.octets.end());
    return out;
}

ArpPacket decode_arp(ByteView bytes) {
    if (bytes.size() != kArpPacketLen)
        throw MalformedFrame("ARP packet must be 28 bytes, got " + std::to_string(bytes.size()));
    ArpPacket p;
    p.htype = load_be16(bytes, 0);
    p.ptype = load_be16(bytes, 2);
    p.hlen = bytes[4];
    p.plen = bytes[5];
    p.oper = load_be16(bytes, 6);
    p.sha = MacAddress::from_bytes(bytes, 8);
    p.spa = Ipv4Address::from_bytes(bytes, 14);
    p.tha = MacAddress::from_bytes(bytes, 18);
    p.tpa = Ipv4Address::from_bytes(bytes, 24);
    return p;
}

}  // namespace padsteg
