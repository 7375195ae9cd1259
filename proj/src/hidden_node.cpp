#include "padsteg/hidden_node.hpp"

#include <string>

#include "padsteg/arp.hpp"
#include "padsteg/error.hpp"
#include "padsteg/ipv4.hpp"

namespace padsteg {

std::map<Carrier, double> default_rate_budgets() {
    return {{Carrier::TCP, 26.98}, {Carrier::ARP, 3.43}, {Carrier::ICMP, 1.90}};
}

void NodeConfig::validate() const {
    if (!(t_init > 0)) throw ConfigError("t_init must be positive");
    if (!(t_data > 0)) throw ConfigError("t_data must be positive");
    if (expiry < 60.0 || expiry > 1200.0)
        throw ConfigError("expiry must lie within the ARP cache range [60, 1200] seconds");
    if (!own_pid.carrier()) throw ConfigError("own pid has no data carrier");
    for (const auto& [c, rate] : rate_budget)
        if (!(rate >= 0)) throw ConfigError("rate budget must be non-negative");
    if (pid_order.empty()) throw ConfigError("pid order must not be empty");
    if (terminator.empty()) throw ConfigError("terminator must not be empty");
    if (mac.is_broadcast() || mac == MacAddress::zero()) throw ConfigError("node MAC must be unicast");
}

std::string_view node_event_name(NodeEventKind k) {
    switch (k) {
        case NodeEventKind::PeerDiscovered: return "PeerDiscovered";
        case NodeEventKind::ChunkReceived: return "ChunkReceived";
        case NodeEventKind::MessageComplete: return "MessageComplete";
        case NodeEventKind::HopRequested: return "HopRequested";
        case NodeEventKind::HopAcknowledged: return "HopAcknowledged";
        case NodeEventKind::PeerExpired: return "PeerExpired";
    }
    return "?";
}

HiddenNode::HiddenNode(NodeConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.rng_seed) {
    cfg_.validate();
    if (!cfg_.advert_target) {
        Ipv4Address gw = cfg_.ip;
        gw.octets[3] = cfg_.ip.octets[3] == 1 ? 254 : 1;
        cfg_.advert_target = gw;
    }
    tcp_seq_ = static_cast<std::uint32_t>(rng_.next_u64());
    tcp_ack_ = static_cast<std::uint32_t>(rng_.next_u64());
}

std::uint16_t HiddenNode::fresh_rd() {
    for (;;)
        if (auto rd = static_cast<std::uint16_t>(rng_.next_u64() >> 48); rd != 0) return rd;
}

EthernetFrame HiddenNode::advertisement_frame(CarrierProtocolId pid, Ipv4Address tpa) {
    auto adv = build_advertising_sequence(pid, fresh_rd(), cfg_.mac, hash_);
    EthernetFrame f{MacAddress::broadcast(), cfg_.mac, kEtherTypeArp,
                    encode_arp(make_arp_request(cfg_.mac, cfg_.ip, tpa)), adv.serialize(), false};
    return f;
}

bool HiddenNode::budget_allows(Carrier c, std::uint64_t bits, VirtualTime now) {
    auto it = cfg_.rate_budget.find(c);
    if (it == cfg_.rate_budget.end()) return true;
    auto& win = window_[c];
    auto& sum = window_bits_[c];
    const VirtualTime day = kSecondsPerDay * kMicrosPerSecond;
    while (!win.empty() && win.front().first <= now - day) {
        sum -= win.front().second;
        win.pop_front();
    }
    return static_cast<double>(sum + bits) <= it->second * static_cast<double>(kSecondsPerDay);
}

std::optional<EthernetFrame> HiddenNode::data_frame(const MacAddress& peer, PeerEntry& entry) {
    const auto carrier = *entry.tx_pid.carrier();
    const std::size_t chunk_len = carrier_chunk_length(entry.tx_pid);
    const std::uint64_t bits = chunk_len * 8;
    if (!budget_allows(carrier, bits, now_)) return std::nullopt;
    const Ipv4Address peer_ip = entry.ip.value_or(*cfg_.advert_target);

    EthernetFrame f;
    f.src = cfg_.mac;
    switch (carrier) {
        case Carrier::TCP: {
            tcp_ack_ += 1460;
            auto ack = make_tcp_ack(cfg_.ip, peer_ip, cfg_.tcp_src_port, cfg_.tcp_dst_port,
                                    tcp_seq_, tcp_ack_);
            f.dst = peer;
            f.ethertype = kEtherTypeIpv4;
            f.payload = encode_tcp(ack);
            break;
        }
        case Carrier::ARP:
            f.dst = MacAddress::broadcast();
            f.ethertype = kEtherTypeArp;
            f.payload = encode_arp(make_arp_request(cfg_.mac, cfg_.ip, peer_ip));
            break;
        case Carrier::ICMP:
            f.dst = peer;
            f.ethertype = kEtherTypeIpv4;
            f.payload = encode_icmp(make_icmp_echo(cfg_.ip, peer_ip, IcmpType::EchoRequest,
                                                   cfg_.tcp_src_port, ++icmp_seq_));
            break;
        case Carrier::UDP:
            f.dst = peer;
            f.ethertype = kEtherTypeIpv4;
            f.payload = encode_udp(make_udp(cfg_.ip, peer_ip, cfg_.tcp_src_port, 53));
            break;
        case Carrier::Other:
            return std::nullopt;
    }
    f.padding = entry.outbound.next_chunk(chunk_len, rng_);

    window_[carrier].emplace_back(now_, bits);
    window_bits_[carrier] += bits;
    bits_sent_[carrier] += bits;
    return f;
}

std::vector<EthernetFrame> HiddenNode::on_tick(VirtualTime now) {
    now_ = now;
    std::vector<EthernetFrame> out;

    const VirtualTime expiry = from_seconds(cfg_.expiry);
    for (auto it = peers_.begin(); it != peers_.end();) {
        if (now - it->second.last_seen > expiry) {
            tick_events_.push_back({NodeEventKind::PeerExpired, it->first, std::nullopt, now});
            it = peers_.erase(it);
        } else {
            ++it;
        }
    }

    if (!last_advert_ || now - *last_advert_ >= from_seconds(cfg_.t_init)) {
        out.push_back(advertisement_frame(cfg_.own_pid, *cfg_.advert_target));
        // Unanswered hop requests ride the advertisement schedule.
        for (auto& [mac, entry] : peers_)
            if (entry.pending_hop && entry.ip)
                out.push_back(advertisement_frame(*entry.pending_hop, *entry.ip));
        last_advert_ = now;
    }

    for (auto& [mac, entry] : peers_) {
        if (entry.outbound.empty() || now < entry.next_send) continue;
        if (auto f = data_frame(mac, entry)) {
            out.push_back(std::move(*f));
            entry.next_send = now + from_seconds(cfg_.t_data);
        }
    }
    return out;
}

std::vector<NodeEvent> HiddenNode::handle_arp(const EthernetFrame& frame, VirtualTime now,
                                              bool& consumed) {
    consumed = false;
    std::vector<NodeEvent> events;
    if (frame.payload.size() != kArpPacketLen || frame.padding.size() != kAdvertLen ||
        all_zero(frame.padding))
        return events;
    ArpPacket arp = decode_arp(frame.payload);
    auto pid = verify_advertisement(frame.padding, frame.src, cfg_.pid_order, hash_);
    if (!pid) return events;
    consumed = true;

    auto it = peers_.find(frame.src);
    if (arp.is_request()) {
        if (it == peers_.end()) {
            PeerEntry entry{*pid, cfg_.own_pid, std::nullopt, std::nullopt, now, arp.spa, StegoStream(cfg_.terminator),
                            Reassembler(cfg_.terminator), 0};
            peers_.emplace(frame.src, std::move(entry));
            events.push_back({NodeEventKind::PeerDiscovered, frame.src, Bytes{pid->value()}, now});
            // Answer with our own advertisement so discovery is mutual.
            outbox_.push_back(advertisement_frame(cfg_.own_pid, *cfg_.advert_target));
            return events;
        }
        PeerEntry& entry = it->second;
        entry.last_seen = now;
        entry.ip = arp.spa;
        // Broadcast re-advertisements are keep-alives; only the hop
        // handshake changes a known peer's carrier.
        if (arp.tpa == cfg_.ip) {
            if (entry.rx_pid != *pid) entry.previous_rx_pid = entry.rx_pid;
            entry.rx_pid = *pid;
            events.push_back({NodeEventKind::HopRequested, frame.src, Bytes{pid->value()}, now});
            auto adv = build_advertising_sequence(entry.tx_pid, fresh_rd(), cfg_.mac, hash_);
            outbox_.push_back({frame.src, cfg_.mac, kEtherTypeArp,
                               encode_arp(make_arp_reply(cfg_.mac, cfg_.ip, frame.src, arp.spa)),
                               adv.serialize(), false});
        }
        return events;
    }

    if (arp.is_reply() && frame.dst == cfg_.mac && it != peers_.end()) {
        PeerEntry& entry = it->second;
        if (entry.rx_pid != *pid) entry.previous_rx_pid = entry.rx_pid;
        entry.rx_pid = *pid;
        entry.last_seen = now;
        entry.ip = arp.spa;
        if (entry.pending_hop) {
            entry.tx_pid = *entry.pending_hop;
            entry.pending_hop.reset();
            events.push_back({NodeEventKind::HopAcknowledged, frame.src, Bytes{entry.tx_pid.value()}, now});
        }
    }
    return events;
}

void HiddenNode::handle_data(const EthernetFrame& frame, VirtualTime now,
                             std::vector<NodeEvent>& events) {
    auto it = peers_.find(frame.src);
    if (it == peers_.end() || frame.padding.empty()) return;
    if (!frame.dst.is_broadcast() && frame.dst != cfg_.mac) return;
    PeerEntry& entry = it->second;
    const Carrier carrier = classify_carrier(frame);
    if (entry.rx_pid.carrier() == carrier) {
        entry.previous_rx_pid.reset();
    } else if (!(entry.previous_rx_pid && entry.previous_rx_pid->carrier() == carrier)) {
        return;
    }
    events.push_back({NodeEventKind::ChunkReceived, frame.src, frame.padding, now});
    if (auto msg = entry.inbound.push(frame.padding))
        events.push_back({NodeEventKind::MessageComplete, frame.src, std::move(*msg), now});
}

std::vector<NodeEvent> HiddenNode::on_frame(const EthernetFrame& frame, VirtualTime now) {
    now_ = now;
    std::vector<NodeEvent> events;
    if (frame.src == cfg_.mac || frame.boundary_unknown) return events;
    try {
        bool consumed = false;
        if (frame.ethertype == kEtherTypeArp) {
            events = handle_arp(frame, now, consumed);
            if (consumed) return events;
        }
        handle_data(frame, now, events);
    } catch (const Error&) {
        events.clear();
    }
    return events;
}

std::vector<EthernetFrame> HiddenNode::drain_outbox() { return std::exchange(outbox_, {}); }

std::vector<NodeEvent> HiddenNode::drain_tick_events() { return std::exchange(tick_events_, {}); }

void HiddenNode::send_message(const MacAddress& peer, ByteView message) {
    auto it = peers_.find(peer);
    if (it == peers_.end()) throw Error("unknown peer " + peer.to_string());
    PeerEntry& entry = it->second;
    const bool was_idle = entry.outbound.empty();
    entry.outbound.enqueue(message);
    if (was_idle) entry.next_send = std::max(entry.next_send, now_ + from_seconds(cfg_.t_data));
}

EthernetFrame HiddenNode::request_hop(const MacAddress& peer, CarrierProtocolId new_pid) {
    auto it = peers_.find(peer);
    if (it == peers_.end()) throw Error("unknown peer " + peer.to_string());
    if (!it->second.ip) throw Error("IP address of peer " + peer.to_string() + " is unknown");
    if (!new_pid.carrier()) throw ConfigError("pid " + std::to_string(new_pid.value()) + " has no carrier");
    it->second.pending_hop = new_pid;
    return advertisement_frame(new_pid, *it->second.ip);
}

}  // namespace padsteg
