#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "padsteg/arp.hpp"
#include "padsteg/frame.hpp"
#include "padsteg/ipv4.hpp"
#include "padsteg/rng.hpp"
#include "padsteg/scenario.hpp"

namespace testing {

using namespace padsteg;

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("padsteg-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline MacAddress random_mac(Rng& rng) {
    MacAddress m;
    for (auto& o : m.octets) o = rng.next_byte();
    m.octets[0] = static_cast<std::uint8_t>((m.octets[0] & 0xfe) | 0x02);
    return m;
}

inline Ipv4Address random_ip(Rng& rng) {
    return Ipv4Address{{10, rng.next_byte(), rng.next_byte(), static_cast<std::uint8_t>(1 + rng.below(254))}};
}

inline Bytes random_bytes(Rng& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = rng.next_byte();
    return b;
}

// A decodable frame of a random kind with random (possibly zero) padding.
inline EthernetFrame random_frame(Rng& rng) {
    const MacAddress src = random_mac(rng);
    const MacAddress dst = rng.below(4) == 0 ? MacAddress::broadcast() : random_mac(rng);
    const Ipv4Address a = random_ip(rng), b = random_ip(rng);
    EthernetFrame f;
    switch (rng.below(5)) {
        case 0: {
            auto p = rng.below(2) ? make_arp_request(src, a, b) : make_arp_reply(src, a, dst, b);
            f = make_frame(dst, src, kEtherTypeArp, encode_arp(p));
            break;
        }
        case 1: {
            auto s = make_tcp_ack(a, b, static_cast<std::uint16_t>(rng.below(65536)), 445,
                                  static_cast<std::uint32_t>(rng.next_u64()), static_cast<std::uint32_t>(rng.next_u64()));
            s.payload = random_bytes(rng, rng.below(3) == 0 ? rng.below(60) : 0);
            f = make_frame(dst, src, kEtherTypeIpv4, encode_tcp(s));
            break;
        }
        case 2:
            f = make_frame(dst, src, kEtherTypeIpv4,
                           encode_icmp(make_icmp_echo(a, b, IcmpType::EchoRequest, 7,
                                                      static_cast<std::uint16_t>(rng.below(65536)),
                                                      random_bytes(rng, rng.below(30)))));
            break;
        case 3:
            f = make_frame(dst, src, kEtherTypeIpv4,
                           encode_udp(make_udp(a, b, 5353, 53, random_bytes(rng, rng.below(40)))));
            break;
        default: {
            Ipv4Header h;
            h.protocol = kIpProtoIgmp;
            h.src = a;
            h.dst = b;
            f = make_frame(dst, src, kEtherTypeIpv4, encode_ipv4_raw(h, random_bytes(rng, 8)));
            break;
        }
    }
    if (rng.below(2))
        for (auto& p : f.padding) p = rng.next_byte();
    return f;
}

inline NodeSpec node_spec(const std::string& name, const std::string& mac, const std::string& ip) {
    NodeSpec n;
    n.name = name;
    n.config.mac = MacAddress::parse(mac);
    n.config.ip = Ipv4Address::parse(ip);
    return n;
}

}  // namespace testing
