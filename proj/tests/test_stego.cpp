#include "doctest.h"
#include "support.hpp"

#include "padsteg/error.hpp"
#include "padsteg/md5.hpp"
#include "padsteg/pattern.hpp"
#include "padsteg/stego.hpp"

using namespace padsteg;

namespace {

const MacAddress kMac = MacAddress::parse("00:1f:28:9a:04:4a");

HashFunction counting_md5(int& calls) {
    return {"md5", 16, [&calls](ByteView b) {
                ++calls;
                const auto d = Md5::digest(b);
                return Bytes(d.begin(), d.end());
            }};
}

}  // namespace

TEST_CASE("carrier protocol ids") {
    CHECK_THROWS_AS(CarrierProtocolId(0), ConfigError);
    CHECK(CarrierProtocolId::tcp().carrier() == Carrier::TCP);
    CHECK(CarrierProtocolId::arp().carrier() == Carrier::ARP);
    CHECK(CarrierProtocolId::icmp().carrier() == Carrier::ICMP);
    CHECK(CarrierProtocolId::udp().carrier() == Carrier::UDP);
    CHECK_FALSE(CarrierProtocolId(9).carrier());
    CHECK(CarrierProtocolId::for_carrier(Carrier::ARP) == CarrierProtocolId::arp());
    CHECK_FALSE(CarrierProtocolId::for_carrier(Carrier::Other));
    CHECK(carrier_chunk_length(CarrierProtocolId::tcp()) == 6);
    CHECK(carrier_chunk_length(CarrierProtocolId::arp()) == 18);
    CHECK(carrier_chunk_length(CarrierProtocolId::icmp()) == 18);
    CHECK(carrier_chunk_length(CarrierProtocolId::udp()) == 18);
    const auto order = default_pid_order();
    REQUIRE(order.size() == 4);
    CHECK(order[0] == CarrierProtocolId::tcp());
    CHECK(order[3] == CarrierProtocolId::udp());
}

TEST_CASE("advertising sequence layout") {
    CHECK(to_hex(advert_preimage(CarrierProtocolId::tcp(), 0xbeef, kMac)) == "01beef001f289a044a");
    const auto a = build_advertising_sequence(CarrierProtocolId::tcp(), 0xbeef, kMac);
    CHECK(a.rd == 0xbeef);
    const Bytes s = a.serialize();
    CHECK(s.size() == kAdvertLen);
    CHECK(to_hex(s) == "beeffad4adbaf699be4fffc6a54acd64ca3a");
    CHECK_THROWS_AS(build_advertising_sequence(CarrierProtocolId::tcp(), 0, kMac), ConfigError);
}

TEST_CASE("verify recovers the advertised pid") {
    const auto order = default_pid_order();
    for (auto pid : order) {
        const Bytes s = build_advertising_sequence(pid, 0x1234, kMac).serialize();
        CHECK(verify_advertisement(s, kMac, order) == pid);
    }
}

TEST_CASE("verify rejects foreign padding") {
    const auto order = default_pid_order();
    int calls = 0;
    const auto h = counting_md5(calls);

    CHECK_FALSE(verify_advertisement(Bytes(18, 0), kMac, order, h));
    CHECK(calls == 0);
    Bytes zero_rd = build_advertising_sequence(CarrierProtocolId::arp(), 7, kMac).serialize();
    zero_rd[0] = zero_rd[1] = 0;
    CHECK_FALSE(verify_advertisement(zero_rd, kMac, order, h));
    CHECK(calls == 0);

    CHECK_FALSE(verify_advertisement(from_hex("80fca7a080fe88e0fffffffff0012179cfd5"), kMac, order, h));
    CHECK(calls == 4);

    CHECK_THROWS_AS(verify_advertisement(Bytes(6, 1), kMac, order, h), StructuralError);
}

TEST_CASE("verify evaluates pids in order and stops at the match") {
    const auto order = default_pid_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
        int calls = 0;
        const auto h = counting_md5(calls);
        const Bytes s = build_advertising_sequence(order[i], 0x00ff, kMac, h).serialize();
        calls = 0;
        CHECK(verify_advertisement(s, kMac, order, h) == order[i]);
        CHECK(calls == static_cast<int>(i + 1));
    }
}

TEST_CASE("pid outside the search order is not found") {
    const std::vector<CarrierProtocolId> order{CarrierProtocolId::tcp(), CarrierProtocolId::arp()};
    const Bytes s = build_advertising_sequence(CarrierProtocolId::udp(), 99, kMac).serialize();
    CHECK_FALSE(verify_advertisement(s, kMac, order));
}

TEST_CASE("chunking a message") {
    Rng rng(1);
    SUBCASE("exact fit over arp") {
        const auto chunks = chunk_message(to_bytes("topsecretmessage"), 18, kCrlf, rng);
        REQUIRE(chunks.size() == 1);
        CHECK(chunks[0] == to_bytes("topsecretmessage\r\n"));
    }
    SUBCASE("tcp pieces with filler") {
        const auto chunks = chunk_message(to_bytes("topsecretmessage"), 6, kCrlf, rng);
        REQUIRE(chunks.size() == 3);
        CHECK(chunks[0] == to_bytes("topsec"));
        CHECK(chunks[1] == to_bytes("retmes"));
        CHECK(Bytes(chunks[2].begin(), chunks[2].begin() + 6) == to_bytes("sage\r\n"));
        CHECK(reassemble(chunks, kCrlf) == to_bytes("topsecretmessage"));
    }
    SUBCASE("filler is nonzero") {
        const auto chunks = chunk_message(to_bytes("hi"), 18, kCrlf, rng);
        REQUIRE(chunks.size() == 1);
        for (std::size_t i = 4; i < 18; ++i) CHECK(chunks[0][i] != 0);
    }
    SUBCASE("empty message") {
        const auto chunks = chunk_message({}, 6, kCrlf, rng);
        REQUIRE(chunks.size() == 1);
        CHECK(reassemble(chunks, kCrlf) == Bytes{});
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(chunk_message(to_bytes("a\r\nb"), 6, kCrlf, rng), StructuralError);
        CHECK_THROWS_AS(chunk_message(to_bytes("\r\n"), 6, kCrlf, rng), StructuralError);
        CHECK_THROWS_AS(chunk_message(to_bytes("a"), 0, kCrlf, rng), StructuralError);
    }
}

TEST_CASE("terminator framing") {
    CHECK(terminator_frames_cleanly(to_bytes("plain"), kCrlf));
    CHECK(terminator_frames_cleanly(to_bytes("line\nbreak"), kCrlf));
    CHECK(terminator_frames_cleanly(to_bytes("ends with cr\r"), kCrlf));
    CHECK_FALSE(terminator_frames_cleanly(to_bytes("xa"), to_bytes("aa")));
    CHECK_FALSE(terminator_frames_cleanly(to_bytes("x\r\ny"), kCrlf));
}

TEST_CASE("reassembly is incomplete without the terminator") {
    const std::vector<StegoChunk> chunks{to_bytes("abcdef")};
    CHECK_FALSE(reassemble(chunks, kCrlf));
}

TEST_CASE("reassembler handles a terminator split across chunks") {
    Reassembler r;
    CHECK_FALSE(r.push(to_bytes("hello\r")));
    CHECK(r.buffered() == 6);
    CHECK(r.push(to_bytes("\nXYZW")) == to_bytes("hello"));
    CHECK(r.buffered() == 0);
}

TEST_CASE("stream keeps messages in separate chunks") {
    Rng rng(2);
    StegoStream s;
    s.enqueue(to_bytes("ab"));
    s.enqueue(to_bytes("cdefgh"));
    CHECK(s.chunks_remaining(6) == 3);
    CHECK(s.bytes_remaining() == 12);
    Reassembler r;
    std::vector<Bytes> got;
    while (!s.empty())
        if (auto m = r.push(s.next_chunk(6, rng))) got.push_back(*m);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == to_bytes("ab"));
    CHECK(got[1] == to_bytes("cdefgh"));
    CHECK(s.next_chunk(6, rng).empty());
    CHECK_THROWS_AS(s.enqueue(to_bytes("x\r\n")), StructuralError);
}

TEST_CASE("stream chunk length may change between chunks") {
    Rng rng(3);
    StegoStream s;
    s.enqueue(to_bytes("the quick brown fox"));
    Reassembler r;
    std::optional<Bytes> done;
    done = r.push(s.next_chunk(18, rng));
    CHECK_FALSE(done);
    while (!s.empty() && !done) done = r.push(s.next_chunk(6, rng));
    CHECK(done == to_bytes("the quick brown fox"));
}

TEST_CASE("padding pattern classes") {
    CHECK_FALSE(classify_padding({}));
    CHECK_FALSE(classify_padding(Bytes(6, 0)));
    CHECK(classify_padding(from_hex("0101050a74b6")) == PaddingPattern::Constant);
    CHECK(classify_padding(from_hex("202020202020")) == PaddingPattern::Constant);
    CHECK(classify_padding(from_hex("80fca7a080fe88e0fffffffff0012179cfd5")) == PaddingPattern::Constant);
    CHECK(classify_padding(from_hex("80fca7a01234567890abcdef1234567890ab")) == PaddingPattern::ConstantPrefix);
    CHECK(classify_padding(from_hex("a96f00112233445566778899aabbccddeeff")) == PaddingPattern::ConstantPrefix);
    CHECK(classify_padding(to_bytes("GET /x")) == PaddingPattern::ConstantPrefix);
    CHECK(classify_padding(from_hex("801122334455")) == PaddingPattern::ConstantPrefix);
    CHECK(classify_padding(from_hex("c51122334455")) == PaddingPattern::ConstantPrefix);
    CHECK(classify_padding(from_hex("000011223344")) == PaddingPattern::ZeroPrefix);
    CHECK(classify_padding(from_hex("0000000000000000000000000000a1b2c3d4")) == PaddingPattern::ZeroPrefix);
    CHECK(classify_padding(from_hex("110000001122")) == PaddingPattern::ZeroRun);
    CHECK(classify_padding(from_hex("3a9f17e2b455")) == PaddingPattern::Random);
    CHECK(parse_pattern("zero-run") == PaddingPattern::ZeroRun);
    CHECK_FALSE(parse_pattern("nope"));
}

TEST_CASE("mimicked padding lands in its class") {
    Rng rng(4);
    for (auto p : kAllPatterns)
        for (std::size_t len : {6u, 18u})
            for (int i = 0; i < 200; ++i) {
                const Bytes b = mimic_padding(len, p, rng);
                REQUIRE(b.size() == len);
                CHECK_FALSE(all_zero(b));
                CHECK(classify_padding(b) == p);
            }
}
