#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "padsteg/background.hpp"
#include "padsteg/frame.hpp"
#include "padsteg/hidden_node.hpp"

namespace padsteg {

enum class SwitchMode { Switch, Hub };

struct SimConfig {
    std::uint64_t seed = 1;
    SwitchMode switching = SwitchMode::Switch;
    VirtualTime latency = 0;
    VirtualTime tick_interval = kMicrosPerSecond;
    std::optional<BackgroundProfile> background;
};

struct NodeHandle {
    std::size_t index = 0;
    bool operator==(const NodeHandle&) const = default;
};

struct EndpointStats {
    std::string name;
    MacAddress mac;
    bool hidden = false;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_received = 0;
};

struct LoggedEvent {
    std::size_t node = 0;
    NodeEvent event;
};

struct MessageRecord {
    std::size_t from = 0;
    std::size_t to = 0;
    Bytes message;
    VirtualTime not_before = 0;
    std::optional<VirtualTime> enqueued;
    std::optional<VirtualTime> delivered;
    std::optional<Bytes> received;  // content of the matching MessageComplete

    bool intact() const { return received && *received == message; }
    /// Message bits over enqueue-to-delivery time; none until delivered.
    std::optional<double> goodput_bps() const;
};

struct SimReport {
    VirtualTime until = 0;
    std::uint64_t frames_emitted = 0;
    std::uint64_t deliveries = 0;
    std::vector<EndpointStats> endpoints;
    std::vector<LoggedEvent> events;
    std::vector<MessageRecord> messages;

    std::size_t count(NodeEventKind kind) const;
    std::size_t count(NodeEventKind kind, std::size_t node) const;
};

/// Called for every emitted frame (before any transformer) with its emission time.
using FrameSink = std::function<void(VirtualTime, ByteView)>;
using FrameTransformer = std::function<Bytes(ByteView)>;

/// Deterministic single-broadcast-domain simulator. Events are processed in
/// (time, insertion sequence) order.
class Simulator {
public:
    explicit Simulator(SimConfig cfg);
    ~Simulator();
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Throws ConfigError on a duplicate MAC.
    NodeHandle attach_node(NodeConfig cfg, std::string name, VirtualTime start = 0);
    /// Passive endpoint that only receives.
    NodeHandle attach_host(MacAddress mac, std::string name);

    HiddenNode& node(NodeHandle h);
    const EndpointStats& stats(NodeHandle h) const;
    /// Background hosts, attached at construction when a profile is set.
    const std::vector<NodeHandle>& background_hosts() const { return background_handles_; }

    void add_sink(FrameSink sink);
    void set_transformer(FrameTransformer t);

    /// Queued to `from` once `to` is a known peer and not before `not_before`.
    void schedule_message(NodeHandle from, NodeHandle to, Bytes message, VirtualTime not_before = 0);
    void schedule_hop(VirtualTime at, NodeHandle from, NodeHandle to, CarrierProtocolId pid);
    /// Emits raw bytes at `at`, attributed to `from` when given.
    void inject(VirtualTime at, Bytes frame, std::optional<NodeHandle> from = std::nullopt);

    /// Processes all events with time <= until. May be called repeatedly with
    /// increasing horizons.
    SimReport run(VirtualTime until);

private:
    struct Endpoint;
    struct Hop {
        std::size_t from;
        std::size_t to;
        CarrierProtocolId pid;
    };
    enum class EventKind { Deliver, NodeTick, BackgroundEmit, Hop, Inject };
    struct Event {
        VirtualTime time = 0;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::Deliver;
        std::size_t target = 0;  // endpoint, or hop/inject index
        std::shared_ptr<const Bytes> wire;
        std::shared_ptr<const std::optional<EthernetFrame>> decoded;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void push(Event e);
    void emit(VirtualTime now, Bytes frame, std::optional<std::size_t> sender);
    void deliver(VirtualTime now, std::size_t target, const std::shared_ptr<const Bytes>& wire,
                 const std::shared_ptr<const std::optional<EthernetFrame>>& decoded);
    void record_events(std::size_t node, std::vector<NodeEvent> events);
    void flush_outbox(VirtualTime now, std::size_t node);
    void dispatch_pending_messages(VirtualTime now);
    SimReport snapshot(VirtualTime until) const;

    SimConfig cfg_;
    std::vector<std::unique_ptr<Endpoint>> endpoints_;
    std::vector<NodeHandle> background_handles_;
    std::unique_ptr<BackgroundGenerator> background_;
    std::vector<FrameSink> sinks_;
    FrameTransformer transformer_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::vector<Hop> hops_;
    std::vector<std::pair<Bytes, std::optional<std::size_t>>> injects_;
    std::uint64_t seq_ = 0;
    bool started_ = false;
    std::vector<MessageRecord> messages_;
    std::vector<LoggedEvent> events_;
    std::uint64_t frames_emitted_ = 0;
    std::uint64_t deliveries_ = 0;
};

}  // namespace padsteg
