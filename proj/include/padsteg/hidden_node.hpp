#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "padsteg/address.hpp"
#include "padsteg/frame.hpp"
#include "padsteg/rng.hpp"
#include "padsteg/stego.hpp"

namespace padsteg {

/// Virtual time in microseconds.
using VirtualTime = std::int64_t;

inline constexpr VirtualTime kMicrosPerSecond = 1'000'000;
inline constexpr VirtualTime kSecondsPerDay = 86'400;

constexpr VirtualTime from_seconds(double s) {
    return static_cast<VirtualTime>(s * static_cast<double>(kMicrosPerSecond) + (s >= 0 ? 0.5 : -0.5));
}
constexpr double to_seconds(VirtualTime t) {
    return static_cast<double>(t) / static_cast<double>(kMicrosPerSecond);
}

/// Average per-host steganographic bandwidth an Etherleak host exhibits (bit/s).
std::map<Carrier, double> default_rate_budgets();

struct NodeConfig {
    MacAddress mac;
    Ipv4Address ip;
    CarrierProtocolId own_pid = CarrierProtocolId::arp();
    double t_init = 180.0;  // seconds between advertisements
    double t_data = 60.0;   // seconds between data frames toward one peer
    double expiry = 180.0;  // seconds without a valid advertisement
    // bit/s ceiling over a sliding day; carriers not listed are unlimited.
    std::map<Carrier, double> rate_budget = default_rate_budgets();
    std::uint64_t rng_seed = 0;
    std::vector<CarrierProtocolId> pid_order = default_pid_order();
    // Cover flow used for the TCP carrier.
    std::uint16_t tcp_src_port = 49'152;
    std::uint16_t tcp_dst_port = 445;
    // Target of periodic advertisements; defaults to .1 of the own /24.
    std::optional<Ipv4Address> advert_target;
    Bytes terminator = kCrlf;

    /// Throws ConfigError.
    void validate() const;
};

enum class NodeEventKind {
    PeerDiscovered,
    ChunkReceived,
    MessageComplete,
    HopRequested,
    HopAcknowledged,
    PeerExpired,
};

std::string_view node_event_name(NodeEventKind k);

struct NodeEvent {
    NodeEventKind kind;
    MacAddress peer;
    std::optional<Bytes> data;  // chunk, message, or the new pid (1 byte) for hops
    VirtualTime time = 0;
};

struct PeerEntry {
    CarrierProtocolId rx_pid;  // carrier the peer sends steganograms on
    CarrierProtocolId tx_pid;  // carrier we send on toward the peer
    std::optional<CarrierProtocolId> previous_rx_pid;  // still accepted until the new one is used
    std::optional<CarrierProtocolId> pending_hop;
    VirtualTime last_seen = 0;
    std::optional<Ipv4Address> ip;
    StegoStream outbound;
    Reassembler inbound;
    VirtualTime next_send = 0;
};

/// Per-node state machine. Driven by on_tick/on_frame; frames produced in
/// reaction to received frames (discovery answers, hop replies) are collected in an outbox.
class HiddenNode {
public:
    explicit HiddenNode(NodeConfig cfg);

    const NodeConfig& config() const { return cfg_; }
    const MacAddress& mac() const { return cfg_.mac; }

    /// Timestamps must be nondecreasing across on_tick/on_frame calls.
    std::vector<EthernetFrame> on_tick(VirtualTime now);
    std::vector<NodeEvent> on_frame(const EthernetFrame& frame, VirtualTime now);

    /// Frames emitted as a reaction inside on_frame.
    std::vector<EthernetFrame> drain_outbox();
    /// Events raised inside on_tick (peer expiry).
    std::vector<NodeEvent> drain_tick_events();

    /// Queues a message for the peer; paced by on_tick. Throws Error for an
    /// unknown peer, StructuralError if the message contains the terminator.
    void send_message(const MacAddress& peer, ByteView message);

    /// ARP Request with tpa = peer IP carrying an advertisement for new_pid.
    /// The transmit carrier switches when the peer's reply arrives.
    EthernetFrame request_hop(const MacAddress& peer, CarrierProtocolId new_pid);

    const std::map<MacAddress, PeerEntry>& peers() const { return peers_; }
    bool knows(const MacAddress& peer) const { return peers_.contains(peer); }

    /// Steganographic data bits emitted per carrier since start.
    const std::map<Carrier, std::uint64_t>& data_bits_sent() const { return bits_sent_; }

private:
    EthernetFrame advertisement_frame(CarrierProtocolId pid, Ipv4Address tpa);
    std::optional<EthernetFrame> data_frame(const MacAddress& peer, PeerEntry& entry);
    bool budget_allows(Carrier c, std::uint64_t bits, VirtualTime now);
    std::uint16_t fresh_rd();
    std::vector<NodeEvent> handle_arp(const EthernetFrame& frame, VirtualTime now, bool& consumed);
    void handle_data(const EthernetFrame& frame, VirtualTime now, std::vector<NodeEvent>& events);

    NodeConfig cfg_;
    HashFunction hash_ = md5_hash();
    Rng rng_;
    std::map<MacAddress, PeerEntry> peers_;
    std::optional<VirtualTime> last_advert_;
    VirtualTime now_ = 0;
    std::vector<EthernetFrame> outbox_;
    std::vector<NodeEvent> tick_events_;
    std::map<Carrier, std::deque<std::pair<VirtualTime, std::uint64_t>>> window_;
    std::map<Carrier, std::uint64_t> window_bits_;
    std::map<Carrier, std::uint64_t> bits_sent_;
    std::uint32_t tcp_seq_ = 0;
    std::uint32_t tcp_ack_ = 0;
    std::uint16_t icmp_seq_ = 0;
};

}  // namespace padsteg
