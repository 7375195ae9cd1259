#include "padsteg/background.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "padsteg/arp.hpp"
#include "padsteg/error.hpp"
#include "padsteg/ipv4.hpp"

namespace padsteg {

namespace {

template <std::size_t N>
void check_distribution(const std::array<double, N>& d, const char* name) {
    for (double x : d)
        if (!(x >= 0)) throw ConfigError(std::string(name) + " has a negative weight");
    double sum = std::accumulate(d.begin(), d.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError(std::string(name) + " sums to " + std::to_string(sum) + ", not 1");
}

void check_ratio(double x, const char* name) {
    if (!(x >= 0 && x <= 1)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void BackgroundProfile::validate() const {
    if (n_hosts < 2) throw ConfigError("background needs at least 2 hosts");
    if (n_hosts > 0xfff0) throw ConfigError("too many background hosts");
    check_ratio(vulnerable_fraction, "vulnerable_fraction");
    check_ratio(improper_given_padded, "improper_given_padded");
    check_ratio(padded_fraction, "padded_fraction");
    check_distribution(protocol_mix, "protocol_mix");
    check_distribution(arp_op_mix, "arp_op_mix");
    check_distribution(pattern_mix, "pattern_mix");
    if (!(frames_per_day > 0)) throw ConfigError("frames_per_day must be positive");
    if (icmp_payload_len >= 18) throw ConfigError("icmp_payload_len must be below 18");
}

std::size_t BackgroundProfile::vulnerable_hosts() const {
    if (vulnerable_fraction <= 0) return 0;
    auto n = static_cast<std::size_t>(std::llround(vulnerable_fraction * static_cast<double>(n_hosts)));
    return std::clamp<std::size_t>(n, 1, n_hosts);
}

BackgroundGenerator::BackgroundGenerator(BackgroundProfile profile, std::uint64_t seed, VirtualTime start)
    : profile_(std::move(profile)), rng_(splitmix64(seed ^ 0x6261636b67726f75ULL)), now_(start) {
    profile_.validate();
    const std::size_t n_vuln = profile_.vulnerable_hosts();
    const std::uint32_t base = profile_.base_ip.to_u32();
    for (std::size_t i = 0; i < profile_.n_hosts; ++i) {
        BackgroundHost h;
        h.mac = {{0x00, 0x1f, 0x28, 0x10, static_cast<std::uint8_t>(i >> 8), static_cast<std::uint8_t>(i)}};
        h.ip = Ipv4Address::from_u32(base + static_cast<std::uint32_t>(i));
        // Spread vulnerable hosts over the address range.
        h.vulnerable = n_vuln > 0 && (i * n_vuln) / profile_.n_hosts != ((i + 1) * n_vuln) / profile_.n_hosts;
        (h.vulnerable ? vulnerable_ : clean_).push_back(i);
        hosts_.push_back(h);
    }
}

std::size_t BackgroundGenerator::other_host(std::size_t host) {
    std::size_t o = rng_.below(hosts_.size() - 1);
    return o >= host ? o + 1 : o;
}

Bytes BackgroundGenerator::padded_frame(std::size_t host, Carrier carrier, bool improper) {
    const auto& src = hosts_[host];
    const auto& peer = hosts_[other_host(host)];
    EthernetFrame f;
    f.src = src.mac;
    f.dst = peer.mac;
    f.ethertype = kEtherTypeIpv4;
    switch (carrier) {
        case Carrier::TCP: {
            auto ack = make_tcp_ack(src.ip, peer.ip, static_cast<std::uint16_t>(1024 + rng_.below(60000)),
                                    443, static_cast<std::uint32_t>(rng_.next_u64()),
                                    static_cast<std::uint32_t>(rng_.next_u64()));
            f.payload = encode_tcp(ack);
            break;
        }
        case Carrier::ARP: {
            f.ethertype = kEtherTypeArp;
            auto kind = static_cast<ArpKind>(rng_.pick(profile_.arp_op_mix));
            ArpPacket p;
            switch (kind) {
                case ArpKind::Request:
                    p = make_arp_request(src.mac, src.ip, peer.ip);
                    f.dst = MacAddress::broadcast();
                    break;
                case ArpKind::Reply:
                    p = make_arp_reply(src.mac, src.ip, peer.mac, peer.ip);
                    break;
                case ArpKind::Gratuitous:
                    p = make_arp_request(src.mac, src.ip, src.ip);
                    f.dst = MacAddress::broadcast();
                    break;
            }
            f.payload = encode_arp(p);
            break;
        }
        case Carrier::ICMP: {
            auto type = rng_.below(2) == 0 ? IcmpType::EchoRequest : IcmpType::EchoReply;
            Bytes payload(profile_.icmp_payload_len);
            for (auto& b : payload) b = rng_.next_byte();
            f.payload = encode_icmp(make_icmp_echo(src.ip, peer.ip, type, static_cast<std::uint16_t>(rng_.below(65536)),
                                                   static_cast<std::uint16_t>(rng_.below(65536)), std::move(payload)));
            break;
        }
        case Carrier::UDP: {
            Bytes payload(12);
            for (auto& b : payload) b = rng_.next_byte();
            f.payload = encode_udp(make_udp(src.ip, peer.ip, static_cast<std::uint16_t>(1024 + rng_.below(60000)),
                                            5060, std::move(payload)));
            break;
        }
        case Carrier::Other: {
            Ipv4Header h;
            h.protocol = kIpProtoIgmp;
            h.ttl = 1;
            h.src = src.ip;
            h.dst = Ipv4Address{{224, 0, 0, 22}};
            Bytes body(8);
            for (auto& b : body) b = rng_.next_byte();
            f.payload = encode_ipv4_raw(h, body);
            f.dst = MacAddress{{0x01, 0x00, 0x5e, 0x00, 0x00, 0x16}};
            break;
        }
    }
    const std::size_t pad_len = compute_padding_length(f.payload.size());
    if (improper) {
        auto pattern = static_cast<PaddingPattern>(rng_.pick(profile_.pattern_mix));
        f.padding = mimic_padding(pad_len, pattern, rng_);
    } else {
        f.padding.assign(pad_len, 0);
    }
    return encode_frame(f);
}

Bytes BackgroundGenerator::unpadded_frame(std::size_t host) {
    const auto& src = hosts_[host];
    const auto& peer = hosts_[other_host(host)];
    auto seg = make_tcp_ack(src.ip, peer.ip, 443, static_cast<std::uint16_t>(1024 + rng_.below(60000)),
                            static_cast<std::uint32_t>(rng_.next_u64()),
                            static_cast<std::uint32_t>(rng_.next_u64()));
    seg.flags = tcp_flags::kAck | tcp_flags::kPsh;
    seg.payload.resize(6 + rng_.below(1455));
    for (auto& b : seg.payload) b = rng_.next_byte();
    return encode_frame(make_frame(peer.mac, src.mac, kEtherTypeIpv4, encode_tcp(seg)));
}

BackgroundEmission BackgroundGenerator::next() {
    const double rate_per_us = profile_.frames_per_day / (static_cast<double>(kSecondsPerDay) * kMicrosPerSecond);
    now_ += static_cast<VirtualTime>(std::ceil(rng_.exponential(rate_per_us)));

    BackgroundEmission e;
    e.time = now_;
    if (rng_.uniform() < profile_.padded_fraction) {
        const bool improper = !vulnerable_.empty() && rng_.uniform() < profile_.improper_given_padded;
        const auto& pool = improper || clean_.empty() ? vulnerable_ : clean_;
        e.host = pool[rng_.below(pool.size())];
        auto carrier = static_cast<Carrier>(rng_.pick(profile_.protocol_mix));
        e.frame = padded_frame(e.host, carrier, improper);
    } else {
        e.host = rng_.below(hosts_.size());
        e.frame = unpadded_frame(e.host);
    }
    return e;
}

std::vector<PcapRecord> generate_background(const BackgroundProfile& profile, VirtualTime duration,
                                            std::uint64_t seed, VirtualTime start) {
    BackgroundGenerator gen(profile, seed, start);
    std::vector<PcapRecord> out;
    for (;;) {
        auto e = gen.next();
        if (e.time >= start + duration) break;
        const auto len = static_cast<std::uint32_t>(e.frame.size());
        out.push_back({e.time, std::move(e.frame), len});
    }
    return out;
}

}  // namespace padsteg
