#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "padsteg/address.hpp"
#include "padsteg/bytes.hpp"
#include "padsteg/frame.hpp"
#include "padsteg/hidden_node.hpp"
#include "padsteg/pattern.hpp"
#include "padsteg/pcap.hpp"
#include "padsteg/rng.hpp"

namespace padsteg {

/// Campaign-wide daily frame average before desk scaling.
inline constexpr double kCampaignFramesPerDay = 7.43e6;
inline constexpr double kDeskScale = 0.05;

enum class ArpKind : std::uint8_t { Request, Reply, Gratuitous };

struct BackgroundProfile {
    std::size_t n_hosts = 20;
    double vulnerable_fraction = 0.15;
    double improper_given_padded = 0.22;
    double padded_fraction = 0.22;
    // Indexed by Carrier (TCP, ARP, ICMP, UDP, Other).
    std::array<double, 5> protocol_mix{0.9282, 0.0417, 0.0231, 0.0054, 0.0016};
    // Indexed by ArpKind; measured shares normalized by their 0.999 total.
    std::array<double, 3> arp_op_mix{0.563 / 0.999, 0.434 / 0.999, 0.002 / 0.999};
    // Indexed by PaddingPattern.
    std::array<double, kPatternCount> pattern_mix{0.2, 0.2, 0.2, 0.2, 0.2};
    double frames_per_day = kCampaignFramesPerDay * kDeskScale;
    std::size_t icmp_payload_len = 0;  // < 18 keeps echo frames padded
    Ipv4Address base_ip{{10, 7, 0, 10}};

    /// Throws ConfigError.
    void validate() const;
    std::size_t vulnerable_hosts() const;
};

struct BackgroundHost {
    MacAddress mac;
    Ipv4Address ip;
    bool vulnerable = false;
};

struct BackgroundEmission {
    VirtualTime time = 0;
    std::size_t host = 0;
    Bytes frame;
};

/// Merged Poisson arrival stream over all hosts; deterministic per seed.
class BackgroundGenerator {
public:
    BackgroundGenerator(BackgroundProfile profile, std::uint64_t seed, VirtualTime start = 0);

    const std::vector<BackgroundHost>& hosts() const { return hosts_; }
    const BackgroundProfile& profile() const { return profile_; }
    BackgroundEmission next();

private:
    Bytes padded_frame(std::size_t host, Carrier carrier, bool improper);
    Bytes unpadded_frame(std::size_t host);
    std::size_t other_host(std::size_t host);

    BackgroundProfile profile_;
    Rng rng_;
    std::vector<BackgroundHost> hosts_;
    std::vector<std::size_t> vulnerable_;
    std::vector<std::size_t> clean_;
    VirtualTime now_;
};

/// All background frames emitted in [start, start + duration).
std::vector<PcapRecord> generate_background(const BackgroundProfile& profile, VirtualTime duration,
                                            std::uint64_t seed, VirtualTime start = 0);

}  // namespace padsteg
