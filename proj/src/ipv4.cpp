#include "padsteg/ipv4.hpp"

#include <string>

#include "padsteg/error.hpp"

namespace padsteg {

namespace {

std::uint32_t ones_sum(ByteView data, std::uint32_t acc) {
    std::size_t i = 0;
    for (; i + 1 < data.size(); i += 2) acc += static_cast<std::uint32_t>((data[i] << 8) | data[i + 1]);
    if (i < data.size()) acc += static_cast<std::uint32_t>(data[i] << 8);
    return acc;
}

std::uint16_t fold(std::uint32_t acc) {
    while (acc >> 16) acc = (acc & 0xffff) + (acc >> 16);
    return static_cast<std::uint16_t>(acc);
}

// TCP/UDP pseudo-header sum.
std::uint32_t pseudo_header_sum(const Ipv4Header& ip, std::uint8_t proto, std::size_t l4_len) {
    std::uint32_t acc = 0;
    acc += static_cast<std::uint32_t>((ip.src.octets[0] << 8) | ip.src.octets[1]);
    acc += static_cast<std::uint32_t>((ip.src.octets[2] << 8) | ip.src.octets[3]);
    acc += static_cast<std::uint32_t>((ip.dst.octets[0] << 8) | ip.dst.octets[1]);
    acc += static_cast<std::uint32_t>((ip.dst.octets[2] << 8) | ip.dst.octets[3]);
    acc += proto;
    acc += static_cast<std::uint32_t>(l4_len);
    return acc;
}

Ipv4Header ip_for(Ipv4Address src, Ipv4Address dst, std::uint8_t proto) {
    Ipv4Header h;
    h.protocol = proto;
    h.src = src;
    h.dst = dst;
    return h;
}

void check_protocol(const Ipv4Header& h, std::uint8_t want, const char* what) {
    if (h.protocol != want) throw MalformedFrame(std::string("IPv4 packet is not ") + what);
}

}  // namespace

std::uint16_t internet_checksum(ByteView data, std::uint32_t initial) {
    return static_cast<std::uint16_t>(~fold(ones_sum(data, initial)));
}

Bytes encode_ipv4_header(const Ipv4Header& h) {
    Bytes out;
    out.reserve(kIpv4HeaderLen);
    out.push_back(0x45);
    out.push_back(h.tos);
    append_be16(out, h.total_length);
    append_be16(out, h.identification);
    append_be16(out, h.flags_fragment);
    out.push_back(h.ttl);
    out.push_back(h.protocol);
    append_be16(out, 0);
    out.insert(out.end(), h.src.octets.begin(), h.src.octets.end());
    out.insert(out.end(), h.dst.octets.begin(), h.dst.octets.end());
    store_be16(out, 10, internet_checksum(out));
    return out;
}

Ipv4Header decode_ipv4_header(ByteView bytes) {
    if (bytes.size() < kIpv4HeaderLen) throw MalformedFrame("IPv4 header truncated");
    if (bytes[0] != 0x45) throw MalformedFrame("only option-less IPv4 headers are supported");
    Ipv4Header h;
    h.tos = bytes[1];
    h.total_length = load_be16(bytes, 2);
    h.identification = load_be16(bytes, 4);
    h.flags_fragment = load_be16(bytes, 6);
    h.ttl = bytes[8];
    h.protocol = bytes[9];
    h.checksum = load_be16(bytes, 10);
    h.src = Ipv4Address::from_bytes(bytes, 12);
    h.dst = Ipv4Address::from_bytes(bytes, 16);
    return h;
}

bool ipv4_header_checksum_ok(ByteView header) {
    return header.size() >= kIpv4HeaderLen && internet_checksum(header.first(kIpv4HeaderLen)) == 0;
}

TcpSegment make_tcp_ack(Ipv4Address src, Ipv4Address dst, std::uint16_t src_port,
                        std::uint16_t dst_port, std::uint32_t seq, std::uint32_t ack) {
    TcpSegment s;
    s.ip = ip_for(src, dst, kIpProtoTcp);
    s.src_port = src_port;
    s.dst_port = dst_port;
    s.seq = seq;
    s.ack = ack;
    s.flags = tcp_flags::kAck;
    return s;
}

IcmpEcho make_icmp_echo(Ipv4Address src, Ipv4Address dst, IcmpType type, std::uint16_t identifier,
                        std::uint16_t sequence, Bytes payload) {
    IcmpEcho m;
    m.ip = ip_for(src, dst, kIpProtoIcmp);
    m.type = type;
    m.identifier = identifier;
    m.sequence = sequence;
    m.payload = std::move(payload);
    return m;
}

UdpDatagram make_udp(Ipv4Address src, Ipv4Address dst, std::uint16_t src_port,
                     std::uint16_t dst_port, Bytes payload) {
    UdpDatagram d;
    d.ip = ip_for(src, dst, kIpProtoUdp);
    d.src_port = src_port;
    d.dst_port = dst_port;
    d.payload = std::move(payload);
    return d;
}

Bytes encode_ipv4_raw(Ipv4Header h, ByteView body) {
    h.total_length = static_cast<std::uint16_t>(kIpv4HeaderLen + body.size());
    Bytes out = encode_ipv4_header(h);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Bytes encode_tcp(const TcpSegment& s) {
    Bytes seg;
    seg.reserve(kTcpHeaderLen + s.payload.size());
    append_be16(seg, s.src_port);
    append_be16(seg, s.dst_port);
    append_be32(seg, s.seq);
    append_be32(seg, s.ack);
    seg.push_back(0x50);  // data offset 5 words
    seg.push_back(s.flags);
    append_be16(seg, s.window);
    append_be16(seg, 0);
    append_be16(seg, 0);  // urgent pointer
    seg.insert(seg.end(), s.payload.begin(), s.payload.end());
    store_be16(seg, 16,
               internet_checksum(seg, pseudo_header_sum(s.ip, kIpProtoTcp, seg.size())));

    Ipv4Header ip = s.ip;
    ip.protocol = kIpProtoTcp;
    return encode_ipv4_raw(ip, seg);
}

Bytes encode_icmp(const IcmpEcho& m) {
    Bytes body;
    body.reserve(kIcmpHeaderLen + m.payload.size());
    body.push_back(static_cast<std::uint8_t>(m.type));
    body.push_back(0);
    append_be16(body, 0);
    append_be16(body, m.identifier);
    append_be16(body, m.sequence);
    body.insert(body.end(), m.payload.begin(), m.payload.end());
    store_be16(body, 2, internet_checksum(body));

    Ipv4Header ip = m.ip;
    ip.protocol = kIpProtoIcmp;
    return encode_ipv4_raw(ip, body);
}

Bytes encode_udp(const UdpDatagram& d) {
    Bytes body;
    body.reserve(kUdpHeaderLen + d.payload.size());
    append_be16(body, d.src_port);
    append_be16(body, d.dst_port);
    append_be16(body, static_cast<std::uint16_t>(kUdpHeaderLen + d.payload.size()));
    append_be16(body, 0);
    body.insert(body.end(), d.payload.begin(), d.payload.end());
    std::uint16_t csum = internet_checksum(body, pseudo_header_sum(d.ip, kIpProtoUdp, body.size()));
    store_be16(body, 6, csum == 0 ? 0xffff : csum);

    Ipv4Header ip = d.ip;
    ip.protocol = kIpProtoUdp;
    return encode_ipv4_raw(ip, body);
}

namespace {

// Validates total length against the buffer and returns the upper-layer body.
ByteView ipv4_body(ByteView packet, const Ipv4Header& h) {
    if (h.total_length != packet.size())
        throw MalformedFrame("IPv4 total length " + std::to_string(h.total_length) +
                             " does not match packet size " + std::to_string(packet.size()));
    return packet.subspan(kIpv4HeaderLen);
}

}  // namespace

Decoded<TcpSegment> decode_tcp(ByteView packet) {
    Decoded<TcpSegment> d;
    d.value.ip = decode_ipv4_header(packet);
    check_protocol(d.value.ip, kIpProtoTcp, "TCP");
    auto seg = ipv4_body(packet, d.value.ip);
    if (seg.size() < kTcpHeaderLen) throw MalformedFrame("TCP header truncated");
    if ((seg[12] >> 4) != 5) throw MalformedFrame("TCP options are not supported");
    auto& s = d.value;
    s.src_port = load_be16(seg, 0);
    s.dst_port = load_be16(seg, 2);
    s.seq = load_be32(seg, 4);
    s.ack = load_be32(seg, 8);
    s.flags = seg[13];
    s.window = load_be16(seg, 14);
    s.checksum = load_be16(seg, 16);
    s.payload.assign(seg.begin() + kTcpHeaderLen, seg.end());
    d.checksums_ok = ipv4_header_checksum_ok(packet) &&
                     internet_checksum(seg, pseudo_header_sum(s.ip, kIpProtoTcp, seg.size())) == 0;
    return d;
}

Decoded<IcmpEcho> decode_icmp(ByteView packet) {
    Decoded<IcmpEcho> d;
    d.value.ip = decode_ipv4_header(packet);
    check_protocol(d.value.ip, kIpProtoIcmp, "ICMP");
    auto body = ipv4_body(packet, d.value.ip);
    if (body.size() < kIcmpHeaderLen) throw MalformedFrame("ICMP header truncated");
    if (body[0] != 0 && body[0] != 8) throw MalformedFrame("ICMP message is not an echo");
    auto& m = d.value;
    m.type = static_cast<IcmpType>(body[0]);
    m.checksum = load_be16(body, 2);
    m.identifier = load_be16(body, 4);
    m.sequence = load_be16(body, 6);
    m.payload.assign(body.begin() + kIcmpHeaderLen, body.end());
    d.checksums_ok = ipv4_header_checksum_ok(packet) && internet_checksum(body) == 0;
    return d;
}

Decoded<UdpDatagram> decode_udp(ByteView packet) {
    Decoded<UdpDatagram> d;
    d.value.ip = decode_ipv4_header(packet);
    check_protocol(d.value.ip, kIpProtoUdp, "UDP");
    auto body = ipv4_body(packet, d.value.ip);
    if (body.size() < kUdpHeaderLen) throw MalformedFrame("UDP header truncated");
    if (load_be16(body, 4) != body.size()) throw MalformedFrame("UDP length mismatch");
    auto& u = d.value;
    u.src_port = load_be16(body, 0);
    u.dst_port = load_be16(body, 2);
    u.checksum = load_be16(body, 6);
    u.payload.assign(body.begin() + kUdpHeaderLen, body.end());
    bool l4_ok = u.checksum == 0 ||
                 internet_checksum(body, pseudo_header_sum(u.ip, kIpProtoUdp, body.size())) == 0;
    d.checksums_ok = ipv4_header_checksum_ok(packet) && l4_ok;
    return d;
}

}  // namespace padsteg
