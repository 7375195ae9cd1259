#include "doctest.h"
#include "support.hpp"

#include "padsteg/error.hpp"
#include "padsteg/hidden_node.hpp"

using namespace padsteg;

namespace {

const MacAddress kMacA = MacAddress::parse("02:00:00:00:00:0a");
const MacAddress kMacB = MacAddress::parse("02:00:00:00:00:0b");
const Ipv4Address kIpA = Ipv4Address::parse("10.1.0.10");
const Ipv4Address kIpB = Ipv4Address::parse("10.1.0.11");

NodeConfig config(MacAddress mac, Ipv4Address ip, std::uint64_t seed) {
    NodeConfig c;
    c.mac = mac;
    c.ip = ip;
    c.rng_seed = seed;
    c.t_data = 1;
    c.rate_budget.clear();
    return c;
}

VirtualTime sec(double s) { return from_seconds(s); }

std::vector<NodeEvent> of_kind(const std::vector<NodeEvent>& ev, NodeEventKind k) {
    std::vector<NodeEvent> out;
    for (const auto& e : ev)
        if (e.kind == k) out.push_back(e);
    return out;
}

// Delivers every frame from `from` to `to`, bouncing outbox replies back.
struct Pair {
    HiddenNode a{config(kMacA, kIpA, 1)};
    HiddenNode b{config(kMacB, kIpB, 2)};
    std::vector<NodeEvent> a_events, b_events;

    void a_to_b(const EthernetFrame& f, VirtualTime t) {
        auto ev = b.on_frame(decode_frame(encode_frame(f)), t);
        b_events.insert(b_events.end(), ev.begin(), ev.end());
        for (const auto& r : b.drain_outbox()) b_to_a(r, t);
    }
    void b_to_a(const EthernetFrame& f, VirtualTime t) {
        auto ev = a.on_frame(decode_frame(encode_frame(f)), t);
        a_events.insert(a_events.end(), ev.begin(), ev.end());
        for (const auto& r : a.drain_outbox()) a_to_b(r, t);
    }
    void tick(VirtualTime t) {
        for (const auto& f : a.on_tick(t)) a_to_b(f, t);
        for (const auto& f : b.on_tick(t)) b_to_a(f, t);
    }
    void run(double from, double to) {
        for (double s = from; s <= to; s += 1) tick(sec(s));
    }
};

}  // namespace

TEST_CASE("first tick advertises the own carrier") {
    HiddenNode a(config(kMacA, kIpA, 1));
    const auto out = a.on_tick(0);
    REQUIRE(out.size() == 1);
    const auto& f = out[0];
    CHECK(f.dst.is_broadcast());
    CHECK(f.ethertype == kEtherTypeArp);
    CHECK(f.padding.size() == 18);
    const auto arp = decode_arp(f.payload);
    CHECK(arp.is_request());
    CHECK(arp.spa == kIpA);
    CHECK(arp.tpa == Ipv4Address::parse("10.1.0.1"));
    CHECK(verify_advertisement(f.padding, kMacA, default_pid_order()) == CarrierProtocolId::arp());
    CHECK_FALSE(verify_advertisement(f.padding, kMacB, default_pid_order()));
}

TEST_CASE("advertisements follow t_init") {
    HiddenNode a(config(kMacA, kIpA, 1));
    std::vector<double> when;
    for (int s = 0; s <= 400; ++s)
        for (const auto& f : a.on_tick(sec(s)))
            if (f.ethertype == kEtherTypeArp) when.push_back(s);
    CHECK(when == std::vector<double>{0, 180, 360});
}

TEST_CASE("gateway advertisement target") {
    auto c = config(kMacA, Ipv4Address::parse("10.1.0.1"), 1);
    HiddenNode a(c);
    CHECK(decode_arp(a.on_tick(0)[0].payload).tpa == Ipv4Address::parse("10.1.0.254"));
    c.advert_target = Ipv4Address::parse("10.1.0.77");
    HiddenNode b(c);
    CHECK(decode_arp(b.on_tick(0)[0].payload).tpa == Ipv4Address::parse("10.1.0.77"));
}

TEST_CASE("discovery is mutual after one advertisement") {
    Pair p;
    for (const auto& f : p.a.on_tick(0)) p.a_to_b(f, 0);
    const auto b_found = of_kind(p.b_events, NodeEventKind::PeerDiscovered);
    const auto a_found = of_kind(p.a_events, NodeEventKind::PeerDiscovered);
    REQUIRE(b_found.size() == 1);
    REQUIRE(a_found.size() == 1);
    CHECK(b_found[0].peer == kMacA);
    CHECK(b_found[0].data == Bytes{CarrierProtocolId::kArp});
    CHECK(a_found[0].peer == kMacB);
    CHECK(p.a.knows(kMacB));
    CHECK(p.b.knows(kMacA));
    CHECK(p.b.peers().at(kMacA).ip == kIpA);
    CHECK(p.b_events.size() == 1);
    CHECK(p.a_events.size() == 1);
}

TEST_CASE("ordinary arp traffic is not an advertisement") {
    HiddenNode b(config(kMacB, kIpB, 2));
    auto f = make_frame(MacAddress::broadcast(), kMacA, kEtherTypeArp, encode_arp(make_arp_request(kMacA, kIpA, kIpB)));
    CHECK(b.on_frame(f, 0).empty());
    Rng rng(9);
    for (auto& x : f.padding) x = rng.next_byte();
    CHECK(b.on_frame(f, 0).empty());
    CHECK_FALSE(b.knows(kMacA));
    CHECK(b.drain_outbox().empty());
}

TEST_CASE("own frames are ignored") {
    HiddenNode a(config(kMacA, kIpA, 1));
    const auto adv = a.on_tick(0)[0];
    CHECK(a.on_frame(adv, 0).empty());
    CHECK(a.peers().empty());
}

TEST_CASE("message over the arp carrier") {
    Pair p;
    p.tick(0);
    CHECK_THROWS_AS(p.a.send_message(MacAddress::parse("02:00:00:00:00:99"), to_bytes("x")), Error);
    CHECK_THROWS_AS(p.a.send_message(kMacB, to_bytes("a\r\nb")), StructuralError);
    p.a.send_message(kMacB, to_bytes("topsecretmessage"));

    const auto frames = p.a.on_tick(sec(1));
    std::vector<EthernetFrame> data;
    for (const auto& f : frames)
        if (f.ethertype == kEtherTypeArp && decode_arp(f.payload).tpa == kIpB) data.push_back(f);
    REQUIRE(data.size() == 1);
    CHECK(data[0].dst.is_broadcast());
    CHECK(data[0].padding == to_bytes("topsecretmessage\r\n"));
    for (const auto& f : frames) p.a_to_b(f, sec(1));

    const auto done = of_kind(p.b_events, NodeEventKind::MessageComplete);
    REQUIRE(done.size() == 1);
    CHECK(done[0].data == to_bytes("topsecretmessage"));
    CHECK(done[0].peer == kMacA);
    CHECK(of_kind(p.b_events, NodeEventKind::ChunkReceived).size() == 1);
    CHECK(p.a.data_bits_sent().at(Carrier::ARP) == 144);
}

TEST_CASE("first data frame waits t_data after the message is queued") {
    auto ca = config(kMacA, kIpA, 1);
    ca.t_data = 60;
    HiddenNode a(ca);
    HiddenNode b(config(kMacB, kIpB, 2));
    b.on_frame(a.on_tick(0)[0], 0);
    for (const auto& f : b.drain_outbox()) a.on_frame(f, 0);
    a.send_message(kMacB, to_bytes("x"));
    for (int s = 1; s < 60; ++s) CHECK(a.on_tick(sec(s)).empty());
    CHECK(a.on_tick(sec(60)).size() == 1);
}

TEST_CASE("chunks from unknown senders or the wrong carrier are dropped") {
    Pair p;
    p.tick(0);
    auto ack = make_frame(kMacB, kMacA, kEtherTypeIpv4, encode_tcp(make_tcp_ack(kIpA, kIpB, 1, 2, 3, 4)));
    ack.padding = to_bytes("hi\r\nzz");
    CHECK(p.b.on_frame(ack, sec(1)).empty());

    HiddenNode c(config(MacAddress::parse("02:00:00:00:00:0c"), Ipv4Address::parse("10.1.0.12"), 3));
    auto stranger = make_frame(MacAddress::broadcast(), c.mac(), kEtherTypeArp,
                               encode_arp(make_arp_request(c.mac(), Ipv4Address::parse("10.1.0.12"), kIpB)));
    stranger.padding = to_bytes("hello there!!!!\r\n");
    CHECK(p.b.on_frame(stranger, sec(1)).empty());
}

TEST_CASE("peers expire without keep-alives") {
    auto cb = config(kMacB, kIpB, 2);
    HiddenNode a(config(kMacA, kIpA, 1));
    HiddenNode b(cb);
    b.on_frame(a.on_tick(0)[0], 0);
    b.drain_outbox();
    b.on_tick(sec(180));
    CHECK(b.drain_tick_events().empty());
    b.on_tick(sec(181));
    const auto ev = b.drain_tick_events();
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == NodeEventKind::PeerExpired);
    CHECK(ev[0].peer == kMacA);
    CHECK_FALSE(b.knows(kMacA));
}

TEST_CASE("periodic advertisements keep a peer alive") {
    Pair p;
    p.run(0, 1000);
    CHECK(p.a.knows(kMacB));
    CHECK(p.b.knows(kMacA));
    CHECK(of_kind(p.a_events, NodeEventKind::PeerDiscovered).size() == 1);
    CHECK(of_kind(p.b_events, NodeEventKind::PeerDiscovered).size() == 1);
}

TEST_CASE("rate budget caps data bits over a sliding day") {
    auto ca = config(kMacA, kIpA, 1);
    ca.rate_budget = {{Carrier::ARP, 3.0 * 144 / 86400}};
    HiddenNode a(ca);
    HiddenNode b(config(kMacB, kIpB, 2));
    b.on_frame(a.on_tick(0)[0], 0);
    for (const auto& f : b.drain_outbox()) a.on_frame(f, 0);
    a.send_message(kMacB, Bytes(18 * 20, 'x'));

    auto data_frames = [&](double from, double to) {
        int n = 0;
        for (double s = from; s <= to; s += 1) {
            for (const auto& f : a.on_tick(sec(s)))
                if (decode_arp(f.payload).tpa == kIpB) ++n;
            for (const auto& f : b.on_tick(sec(s))) a.on_frame(f, sec(s));
        }
        return n;
    };
    CHECK(data_frames(1, 5000) == 3);
    CHECK(data_frames(5001, 86400) == 0);
    CHECK(data_frames(86401, 86410) == 3);
    CHECK(a.data_bits_sent().at(Carrier::ARP) == 6 * 144);
}

TEST_CASE("hop handshake moves the carrier to tcp") {
    Pair p;
    p.tick(0);
    CHECK_THROWS_AS(p.a.request_hop(MacAddress::parse("02:00:00:00:00:99"), CarrierProtocolId::tcp()), Error);
    CHECK_THROWS_AS(p.a.request_hop(kMacB, CarrierProtocolId(9)), ConfigError);

    const auto req = p.a.request_hop(kMacB, CarrierProtocolId::tcp());
    CHECK(req.dst.is_broadcast());
    CHECK(decode_arp(req.payload).tpa == kIpB);
    CHECK(verify_advertisement(req.padding, kMacA, default_pid_order()) == CarrierProtocolId::tcp());
    CHECK(p.a.peers().at(kMacB).pending_hop == CarrierProtocolId::tcp());

    auto ev = p.b.on_frame(req, sec(1));
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == NodeEventKind::HopRequested);
    CHECK(ev[0].data == Bytes{CarrierProtocolId::kTcp});
    CHECK(p.b.peers().at(kMacA).rx_pid == CarrierProtocolId::tcp());
    CHECK(p.b.peers().at(kMacA).previous_rx_pid == CarrierProtocolId::arp());

    auto replies = p.b.drain_outbox();
    REQUIRE(replies.size() == 1);
    CHECK(replies[0].dst == kMacA);
    CHECK(decode_arp(replies[0].payload).is_reply());
    CHECK(verify_advertisement(replies[0].padding, kMacB, default_pid_order()) == CarrierProtocolId::arp());

    ev = p.a.on_frame(replies[0], sec(1));
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == NodeEventKind::HopAcknowledged);
    CHECK(p.a.peers().at(kMacB).tx_pid == CarrierProtocolId::tcp());
    CHECK_FALSE(p.a.peers().at(kMacB).pending_hop);

    p.a.send_message(kMacB, to_bytes("over tcp now"));
    const auto out = p.a.on_tick(sec(2));
    REQUIRE(out.size() == 1);
    CHECK(out[0].dst == kMacB);
    CHECK(classify_carrier(out[0]) == Carrier::TCP);
    CHECK(out[0].padding == to_bytes("over t"));
}

TEST_CASE("receiver accepts the previous carrier until the new one is used") {
    Pair p;
    p.tick(0);
    p.b.on_frame(p.a.request_hop(kMacB, CarrierProtocolId::tcp()), sec(1));
    p.b.drain_outbox();

    auto arp_chunk = make_frame(MacAddress::broadcast(), kMacA, kEtherTypeArp, encode_arp(make_arp_request(kMacA, kIpA, kIpB)));
    arp_chunk.padding = to_bytes("still on arp......");
    CHECK(of_kind(p.b.on_frame(arp_chunk, sec(2)), NodeEventKind::ChunkReceived).size() == 1);

    auto ack = make_frame(kMacB, kMacA, kEtherTypeIpv4, encode_tcp(make_tcp_ack(kIpA, kIpB, 1, 2, 3, 4)));
    ack.padding = to_bytes("tcp...");
    CHECK(of_kind(p.b.on_frame(ack, sec(3)), NodeEventKind::ChunkReceived).size() == 1);
    CHECK_FALSE(p.b.peers().at(kMacA).previous_rx_pid);
    CHECK(p.b.on_frame(arp_chunk, sec(4)).empty());
}

TEST_CASE("keep-alive advertisements do not undo a hop") {
    Pair p;
    p.tick(0);
    p.a_to_b(p.a.request_hop(kMacB, CarrierProtocolId::tcp()), sec(1));
    CHECK(p.a.peers().at(kMacB).tx_pid == CarrierProtocolId::tcp());
    p.run(2, 400);
    CHECK(p.b.peers().at(kMacA).rx_pid == CarrierProtocolId::tcp());
    CHECK(p.a.peers().at(kMacB).tx_pid == CarrierProtocolId::tcp());
    CHECK(p.a.peers().at(kMacB).rx_pid == CarrierProtocolId::arp());
}

TEST_CASE("node config validation") {
    auto c = config(kMacA, kIpA, 1);
    CHECK_NOTHROW(c.validate());
    c.expiry = 59;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.expiry = 1200;
    CHECK_NOTHROW(c.validate());
    c.expiry = 1201;
    CHECK_THROWS_AS(HiddenNode{c}, ConfigError);
    c = config(kMacA, kIpA, 1);
    c.t_data = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config(MacAddress::broadcast(), kIpA, 1);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = config(kMacA, kIpA, 1);
    c.own_pid = CarrierProtocolId(7);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(default_rate_budgets().at(Carrier::TCP) == doctest::Approx(26.98));
    CHECK(default_rate_budgets().at(Carrier::ARP) == doctest::Approx(3.43));
    CHECK(default_rate_budgets().at(Carrier::ICMP) == doctest::Approx(1.90));
}
