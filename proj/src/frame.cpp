#include "padsteg/frame.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "padsteg/arp.hpp"
#include "padsteg/error.hpp"
#include "padsteg/ipv4.hpp"

namespace padsteg {

std::string_view carrier_name(Carrier c) {
    switch (c) {
        case Carrier::TCP: return "tcp";
        case Carrier::ARP: return "arp";
        case Carrier::ICMP: return "icmp";
        case Carrier::UDP: return "udp";
        case Carrier::Other: return "other";
    }
    return "other";
}

std::optional<Carrier> parse_carrier(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto c : kAllCarriers)
        if (carrier_name(c) == lower) return c;
    return std::nullopt;
}

EthernetFrame make_frame(MacAddress dst, MacAddress src, std::uint16_t ethertype, Bytes payload) {
    EthernetFrame f{dst, src, ethertype, std::move(payload), {}, false};
    f.padding.assign(compute_padding_length(f.payload.size()), 0);
    return f;
}

Bytes encode_frame(const EthernetFrame& frame) {
    if (frame.padding.size() != compute_padding_length(frame.payload.size()))
        throw StructuralError("padding length " + std::to_string(frame.padding.size()) +
                              " inconsistent with payload length " +
                              std::to_string(frame.payload.size()));
    Bytes out;
    out.reserve(frame.wire_length());
    out.insert(out.end(), frame.dst.octets.begin(), frame.dst.octets.end());
    out.insert(out.end(), frame.src.octets.begin(), frame.src.octets.end());
    append_be16(out, frame.ethertype);
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    out.insert(out.end(), frame.padding.begin(), frame.padding.end());
    return out;
}

EthernetFrame decode_frame(ByteView bytes) {
    if (bytes.size() < kMinFrameLen)
        throw TruncatedFrame("frame of " + std::to_string(bytes.size()) +
                             " bytes is shorter than the 60-byte minimum");
    EthernetFrame f;
    f.dst = MacAddress::from_bytes(bytes, 0);
    f.src = MacAddress::from_bytes(bytes, 6);
    f.ethertype = load_be16(bytes, 12);
    auto data = bytes.subspan(kEthernetHeaderLen);

    std::size_t payload_len = 0;
    if (f.ethertype == kEtherTypeArp) {
        payload_len = kArpPacketLen;
    } else if (f.ethertype == kEtherTypeIpv4) {
        if ((data[0] >> 4) != 4 || (data[0] & 0x0f) < 5)
            throw MalformedFrame("IPv4 version/IHL invalid");
        payload_len = load_be16(data, 2);
        if (payload_len < kIpv4HeaderLen) throw MalformedFrame("IPv4 total length below header size");
        if (payload_len > data.size())
            throw MalformedFrame("IPv4 total length " + std::to_string(payload_len) +
                                 " exceeds available " + std::to_string(data.size()) + " bytes");
    } else {
        // No length information: only a minimum-size frame can hide padding.
        f.payload.assign(data.begin(), data.end());
        f.boundary_unknown = bytes.size() == kMinFrameLen;
        return f;
    }

    if (bytes.size() != std::max(kMinFrameLen, kEthernetHeaderLen + payload_len))
        throw MalformedFrame("wire length " + std::to_string(bytes.size()) +
                             " does not match upper-layer length " + std::to_string(payload_len));
    f.payload.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(payload_len));
    f.padding.assign(data.begin() + static_cast<std::ptrdiff_t>(payload_len), data.end());
    return f;
}

Carrier classify_carrier(const EthernetFrame& frame) {
    if (frame.ethertype == kEtherTypeArp) return Carrier::ARP;
    if (frame.ethertype == kEtherTypeIpv4 && frame.payload.size() >= kIpv4HeaderLen) {
        switch (frame.payload[9]) {
            case kIpProtoTcp: return Carrier::TCP;
            case kIpProtoUdp: return Carrier::UDP;
            case kIpProtoIcmp: return Carrier::ICMP;
            default: break;
        }
    }
    return Carrier::Other;
}

}  // namespace padsteg
