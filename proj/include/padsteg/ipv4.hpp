#pragma once

#include <cstdint>

#include "padsteg/address.hpp"
#include "padsteg/bytes.hpp"

namespace padsteg {

inline constexpr std::size_t kIpv4HeaderLen = 20;
inline constexpr std::size_t kTcpHeaderLen = 20;
inline constexpr std::size_t kIcmpHeaderLen = 8;
inline constexpr std::size_t kUdpHeaderLen = 8;

inline constexpr std::uint8_t kIpProtoIcmp = 1;
inline constexpr std::uint8_t kIpProtoIgmp = 2;
inline constexpr std::uint8_t kIpProtoTcp = 6;
inline constexpr std::uint8_t kIpProtoUdp = 17;

namespace tcp_flags {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kPsh = 0x08;
inline constexpr std::uint8_t kAck = 0x10;
}  // namespace tcp_flags

/// RFC 1071 ones-complement sum folded to 16 bits, complemented.
std::uint16_t internet_checksum(ByteView data, std::uint32_t initial = 0);

// 20-byte IPv4 header without options.
struct Ipv4Header {
    std::uint8_t tos = 0;
    std::uint16_t total_length = 0;
    std::uint16_t identification = 0;
    std::uint16_t flags_fragment = 0x4000;  // DF
    std::uint8_t ttl = 64;
    std::uint8_t protocol = 0;
    std::uint16_t checksum = 0;
    Ipv4Address src;
    Ipv4Address dst;

    bool operator==(const Ipv4Header&) const = default;
};

/// Emits the header with checksum recomputed.
Bytes encode_ipv4_header(const Ipv4Header& h);
/// Parses the first 20 bytes; throws MalformedFrame on version/IHL problems.
Ipv4Header decode_ipv4_header(ByteView bytes);
bool ipv4_header_checksum_ok(ByteView header);

/// TCP segment with no options. With an empty payload and ACK set this is
/// the 40-byte pure acknowledgement.
struct TcpSegment {
    Ipv4Header ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    std::uint8_t flags = tcp_flags::kAck;
    std::uint16_t window = 65535;
    std::uint16_t checksum = 0;
    Bytes payload;

    bool operator==(const TcpSegment&) const = default;
};

TcpSegment make_tcp_ack(Ipv4Address src, Ipv4Address dst, std::uint16_t src_port,
                        std::uint16_t dst_port, std::uint32_t seq, std::uint32_t ack);

enum class IcmpType : std::uint8_t { EchoReply = 0, EchoRequest = 8 };

struct IcmpEcho {
    Ipv4Header ip;
    IcmpType type = IcmpType::EchoRequest;
    std::uint16_t identifier = 0;
    std::uint16_t sequence = 0;
    std::uint16_t checksum = 0;
    Bytes payload;

    bool operator==(const IcmpEcho&) const = default;
};

IcmpEcho make_icmp_echo(Ipv4Address src, Ipv4Address dst, IcmpType type, std::uint16_t identifier,
                        std::uint16_t sequence, Bytes payload = {});

struct UdpDatagram {
    Ipv4Header ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint16_t checksum = 0;
    Bytes payload;

    bool operator==(const UdpDatagram&) const = default;
};

UdpDatagram make_udp(Ipv4Address src, Ipv4Address dst, std::uint16_t src_port,
                     std::uint16_t dst_port, Bytes payload = {});

// Encoders fill in total length and every checksum.
Bytes encode_tcp(const TcpSegment& s);
Bytes encode_icmp(const IcmpEcho& m);
Bytes encode_udp(const UdpDatagram& d);
/// IPv4 packet carrying an opaque upper-layer body (e.g. IGMP).
Bytes encode_ipv4_raw(Ipv4Header h, ByteView body);

template <typename T>
struct Decoded {
    T value;
    bool checksums_ok = false;
};

// Decoders take the exact IPv4 packet (no padding) and report checksum validity.
Decoded<TcpSegment> decode_tcp(ByteView packet);
Decoded<IcmpEcho> decode_icmp(ByteView packet);
Decoded<UdpDatagram> decode_udp(ByteView packet);

}  // namespace padsteg
