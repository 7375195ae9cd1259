#include "padsteg/address.hpp"

#include <charconv>
#include <cstdio>

#include "padsteg/error.hpp"

namespace padsteg {

MacAddress MacAddress::parse(std::string_view text) {
    MacAddress mac;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        if (i > 0) {
            if (pos >= text.size() || (text[pos] != ':' && text[pos] != '-'))
                throw FormatError("bad MAC address '" + std::string(text) + "'");
            ++pos;
        }
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos,
                                         text.data() + std::min(pos + 2, text.size()), v, 16);
        std::size_t used = static_cast<std::size_t>(ptr - (text.data() + pos));
        if (ec != std::errc{} || used == 0 || v > 0xff)
            throw FormatError("bad MAC address '" + std::string(text) + "'");
        mac.octets[i] = static_cast<std::uint8_t>(v);
        pos += used;
    }
    if (pos != text.size()) throw FormatError("bad MAC address '" + std::string(text) + "'");
    return mac;
}

MacAddress MacAddress::from_bytes(ByteView b, std::size_t off) {
    MacAddress mac;
    for (std::size_t i = 0; i < 6; ++i) mac.octets[i] = b[off + i];
    return mac;
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1],
                  octets[2], octets[3], octets[4], octets[5]);
    return buf;
}

Ipv4Address Ipv4Address::parse(std::string_view text) {
    Ipv4Address ip;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (i > 0) {
            if (pos >= text.size() || text[pos] != '.')
                throw FormatError("bad IPv4 address '" + std::string(text) + "'");
            ++pos;
        }
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v, 10);
        if (ec != std::errc{} || ptr == text.data() + pos || v > 255)
            throw FormatError("bad IPv4 address '" + std::string(text) + "'");
        ip.octets[i] = static_cast<std::uint8_t>(v);
        pos = static_cast<std::size_t>(ptr - text.data());
    }
    if (pos != text.size()) throw FormatError("bad IPv4 address '" + std::string(text) + "'");
    return ip;
}

Ipv4Address Ipv4Address::from_bytes(ByteView b, std::size_t off) {
    Ipv4Address ip;
    for (std::size_t i = 0; i < 4; ++i) ip.octets[i] = b[off + i];
    return ip;
}

Ipv4Address Ipv4Address::from_u32(std::uint32_t v) {
    return {{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
             static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)}};
}

std::uint32_t Ipv4Address::to_u32() const {
    return (std::uint32_t{octets[0]} << 24) | (std::uint32_t{octets[1]} << 16) |
           (std::uint32_t{octets[2]} << 8) | std::uint32_t{octets[3]};
}

std::string Ipv4Address::to_string() const {
    return std::to_string(octets[0]) + "." + std::to_string(octets[1]) + "." +
           std::to_string(octets[2]) + "." + std::to_string(octets[3]);
}

}  // namespace padsteg
