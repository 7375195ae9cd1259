#include "padsteg/sim.hpp"

#include <map>

#include "padsteg/error.hpp"

namespace padsteg {

std::optional<double> MessageRecord::goodput_bps() const {
    if (!enqueued || !delivered) return std::nullopt;
    const VirtualTime dt = std::max<VirtualTime>(*delivered - *enqueued, 1);
    return static_cast<double>(message.size() * 8) / to_seconds(dt);
}

std::size_t SimReport::count(NodeEventKind kind) const {
    std::size_t n = 0;
    for (const auto& e : events) n += e.event.kind == kind ? 1 : 0;
    return n;
}

std::size_t SimReport::count(NodeEventKind kind, std::size_t node) const {
    std::size_t n = 0;
    for (const auto& e : events) n += (e.event.kind == kind && e.node == node) ? 1 : 0;
    return n;
}

struct Simulator::Endpoint {
    EndpointStats stats;
    std::unique_ptr<HiddenNode> node;
    VirtualTime start = 0;
};

namespace {
bool is_group(const MacAddress& mac) { return (mac.octets[0] & 0x01) != 0; }
}  // namespace

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.tick_interval <= 0) throw ConfigError("tick interval must be positive");
    if (cfg_.latency < 0) throw ConfigError("latency must be non-negative");
    if (cfg_.background) {
        background_ = std::make_unique<BackgroundGenerator>(*cfg_.background, cfg_.seed);
        std::size_t i = 0;
        for (const auto& h : background_->hosts())
            background_handles_.push_back(attach_host(h.mac, "bg" + std::to_string(i++)));
    }
}

Simulator::~Simulator() = default;

NodeHandle Simulator::attach_node(NodeConfig cfg, std::string name, VirtualTime start) {
    for (const auto& e : endpoints_)
        if (e->stats.mac == cfg.mac) throw ConfigError("duplicate MAC " + cfg.mac.to_string());
    auto ep = std::make_unique<Endpoint>();
    ep->stats = {std::move(name), cfg.mac, true, 0, 0};
    ep->node = std::make_unique<HiddenNode>(std::move(cfg));
    ep->start = start;
    endpoints_.push_back(std::move(ep));
    const std::size_t idx = endpoints_.size() - 1;
    if (started_) push({std::max(start, 0L), 0, EventKind::NodeTick, idx, nullptr, nullptr});
    return {idx};
}

NodeHandle Simulator::attach_host(MacAddress mac, std::string name) {
    for (const auto& e : endpoints_)
        if (e->stats.mac == mac) throw ConfigError("duplicate MAC " + mac.to_string());
    auto ep = std::make_unique<Endpoint>();
    ep->stats = {std::move(name), mac, false, 0, 0};
    endpoints_.push_back(std::move(ep));
    return {endpoints_.size() - 1};
}

HiddenNode& Simulator::node(NodeHandle h) {
    auto& ep = endpoints_.at(h.index);
    if (!ep->node) throw Error("endpoint " + ep->stats.name + " is not a hidden node");
    return *ep->node;
}

const EndpointStats& Simulator::stats(NodeHandle h) const { return endpoints_.at(h.index)->stats; }

void Simulator::add_sink(FrameSink sink) { sinks_.push_back(std::move(sink)); }

void Simulator::set_transformer(FrameTransformer t) { transformer_ = std::move(t); }

void Simulator::schedule_message(NodeHandle from, NodeHandle to, Bytes message, VirtualTime not_before) {
    const auto& sender = node(from);
    if (!terminator_frames_cleanly(message, sender.config().terminator))
        throw StructuralError("terminator occurs inside the message");
    endpoints_.at(to.index);
    messages_.push_back({from.index, to.index, std::move(message), not_before, {}, {}, {}});
}

void Simulator::schedule_hop(VirtualTime at, NodeHandle from, NodeHandle to, CarrierProtocolId pid) {
    node(from);
    endpoints_.at(to.index);
    hops_.push_back({from.index, to.index, pid});
    push({at, 0, EventKind::Hop, hops_.size() - 1, nullptr, nullptr});
}

void Simulator::inject(VirtualTime at, Bytes frame, std::optional<NodeHandle> from) {
    injects_.emplace_back(std::move(frame), from ? std::optional<std::size_t>(from->index) : std::nullopt);
    push({at, 0, EventKind::Inject, injects_.size() - 1, nullptr, nullptr});
}

void Simulator::push(Event e) {
    e.seq = seq_++;
    queue_.push(std::move(e));
}

void Simulator::emit(VirtualTime now, Bytes frame, std::optional<std::size_t> sender) {
    ++frames_emitted_;
    if (sender) ++endpoints_[*sender]->stats.frames_sent;
    for (const auto& sink : sinks_) sink(now, frame);

    auto wire = std::make_shared<const Bytes>(transformer_ ? transformer_(frame) : std::move(frame));
    std::optional<EthernetFrame> decoded;
    try {
        decoded = decode_frame(*wire);
    } catch (const Error&) {
    }
    auto shared_decoded = std::make_shared<const std::optional<EthernetFrame>>(std::move(decoded));

    if (wire->size() < 6) return;
    const MacAddress dst = MacAddress::from_bytes(*wire, 0);
    const bool flood = cfg_.switching == SwitchMode::Hub || is_group(dst);
    for (std::size_t j = 0; j < endpoints_.size(); ++j) {
        if (sender && j == *sender) continue;
        if (flood || endpoints_[j]->stats.mac == dst)
            push({now + cfg_.latency, 0, EventKind::Deliver, j, wire, shared_decoded});
    }
}

void Simulator::record_events(std::size_t node_idx, std::vector<NodeEvent> events) {
    for (auto& ev : events) {
        if (ev.kind == NodeEventKind::MessageComplete) {
            for (auto& m : messages_) {
                if (m.to != node_idx || !m.enqueued || m.delivered) continue;
                if (endpoints_[m.from]->stats.mac != ev.peer) continue;
                m.delivered = ev.time;
                m.received = ev.data;
                break;
            }
        }
        events_.push_back({node_idx, std::move(ev)});
    }
}

void Simulator::flush_outbox(VirtualTime now, std::size_t node_idx) {
    for (auto& f : endpoints_[node_idx]->node->drain_outbox()) emit(now, encode_frame(f), node_idx);
}

void Simulator::dispatch_pending_messages(VirtualTime now) {
    for (auto& m : messages_) {
        if (m.enqueued || now < m.not_before) continue;
        auto& sender = *endpoints_[m.from]->node;
        const MacAddress& peer = endpoints_[m.to]->stats.mac;
        if (!sender.knows(peer)) continue;
        sender.send_message(peer, m.message);
        m.enqueued = now;
    }
}

void Simulator::deliver(VirtualTime now, std::size_t target, const std::shared_ptr<const Bytes>&,
                        const std::shared_ptr<const std::optional<EthernetFrame>>& decoded) {
    ++deliveries_;
    auto& ep = *endpoints_[target];
    ++ep.stats.frames_received;
    if (!ep.node || !decoded->has_value() || now < ep.start) return;
    record_events(target, ep.node->on_frame(**decoded, now));
    flush_outbox(now, target);
    dispatch_pending_messages(now);
}

SimReport Simulator::run(VirtualTime until) {
    if (!started_) {
        started_ = true;
        for (std::size_t i = 0; i < endpoints_.size(); ++i)
            if (endpoints_[i]->node)
                push({std::max<VirtualTime>(endpoints_[i]->start, 0), 0, EventKind::NodeTick, i, nullptr, nullptr});
        if (background_) {
            auto e = background_->next();
            push({e.time, 0, EventKind::BackgroundEmit, background_handles_[e.host].index,
                  std::make_shared<const Bytes>(std::move(e.frame)), nullptr});
        }
    }

    while (!queue_.empty() && queue_.top().time <= until) {
        Event ev = queue_.top();
        queue_.pop();
        const VirtualTime now = ev.time;
        switch (ev.kind) {
            case EventKind::NodeTick: {
                auto& n = *endpoints_[ev.target]->node;
                auto frames = n.on_tick(now);
                record_events(ev.target, n.drain_tick_events());
                for (auto& f : frames) emit(now, encode_frame(f), ev.target);
                dispatch_pending_messages(now);
                push({now + cfg_.tick_interval, 0, EventKind::NodeTick, ev.target, nullptr, nullptr});
                break;
            }
            case EventKind::BackgroundEmit: {
                emit(now, *ev.wire, ev.target);
                auto e = background_->next();
                push({e.time, 0, EventKind::BackgroundEmit, background_handles_[e.host].index,
                      std::make_shared<const Bytes>(std::move(e.frame)), nullptr});
                break;
            }
            case EventKind::Deliver:
                deliver(now, ev.target, ev.wire, ev.decoded);
                break;
            case EventKind::Hop: {
                const Hop& hop = hops_[ev.target];
                auto& n = *endpoints_[hop.from]->node;
                const MacAddress& peer = endpoints_[hop.to]->stats.mac;
                if (!n.knows(peer) || !n.peers().at(peer).ip) break;
                emit(now, encode_frame(n.request_hop(peer, hop.pid)), hop.from);
                break;
            }
            case EventKind::Inject: {
                auto& [bytes, from] = injects_[ev.target];
                emit(now, bytes, from);
                break;
            }
        }
    }
    return snapshot(until);
}

SimReport Simulator::snapshot(VirtualTime until) const {
    SimReport r;
    r.until = until;
    r.frames_emitted = frames_emitted_;
    r.deliveries = deliveries_;
    for (const auto& e : endpoints_) r.endpoints.push_back(e->stats);
    r.events = events_;
    r.messages = messages_;
    return r;
}

}  // namespace padsteg
