#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "padsteg/analyzer.hpp"
#include "padsteg/commands.hpp"
#include "padsteg/pcap.hpp"
#include "padsteg/report.hpp"

using namespace padsteg;
using testing::TempDir;

namespace {

const std::filesystem::path kScenarios = std::filesystem::path(PADSTEG_SOURCE_DIR) / "scenarios";

int run_cli(const std::string& args, std::string* out = nullptr) {
    const std::string cmd = std::string(PADSTEG_CLI) + " " + args + " > cli_out.txt 2> cli_err.txt";
    const int status = std::system(cmd.c_str());
    if (out) {
        std::ifstream in("cli_out.txt");
        std::stringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

KeyValueReport load_report(const std::filesystem::path& p) {
    std::ifstream in(p);
    return KeyValueReport::parse(in);
}

double number(const KeyValueReport& r, const std::string& key) {
    const auto* v = r.get(key);
    REQUIRE_MESSAGE(v, key);
    return std::stod(*v);
}

Bytes file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct Streams {
    std::ostringstream out, err;
};

}  // namespace

TEST_CASE("bandwidth on the weekly counts") {
    TempDir dir;
    Streams s;
    BandwidthOptions o{kScenarios / "weekly_counts.txt", "tcp=48,arp=144,icmp=48", dir / "bw.txt"};
    REQUIRE(cmd_bandwidth(o, s.out, s.err) == kExitOk);
    CHECK(s.out.str().find("26.98") != std::string::npos);
    CHECK(s.out.str().find("12.03") != std::string::npos);
    CHECK(s.out.str().find("5.38") != std::string::npos);
    CHECK(s.out.str().find("note:") != std::string::npos);
    CHECK(s.err.str().find("udp") != std::string::npos);
    const auto r = load_report(dir / "bw.txt");
    CHECK(number(r, "bandwidth.tcp.mean") == doctest::Approx(26.975891).epsilon(1e-6));
    CHECK(number(r, "bandwidth.arp.mean") == doctest::Approx(2.685).epsilon(1e-6));
    CHECK(number(r, "bandwidth.icmp.mean") == doctest::Approx(0.530111).epsilon(1e-5));
    CHECK(r.get("note") != nullptr);
    CHECK(r.get("bandwidth.udp.mean") == nullptr);
}

TEST_CASE("bandwidth bits override is linear") {
    TempDir dir;
    Streams s;
    REQUIRE(cmd_bandwidth({kScenarios / "weekly_counts.txt", "", dir / "a.txt"}, s.out, s.err) == kExitOk);
    REQUIRE(cmd_bandwidth({kScenarios / "weekly_counts.txt", "tcp=96,udp=48", dir / "b.txt"}, s.out, s.err) == kExitOk);
    const auto a = load_report(dir / "a.txt");
    const auto b = load_report(dir / "b.txt");
    CHECK(number(b, "bandwidth.tcp.mean") == doctest::Approx(2 * number(a, "bandwidth.tcp.mean")));
    CHECK(number(b, "bandwidth.arp.mean") == doctest::Approx(number(a, "bandwidth.arp.mean")));
    CHECK(b.get("bandwidth.udp.mean") != nullptr);
}

TEST_CASE("bandwidth with equal counts") {
    TempDir dir;
    std::ofstream(dir / "c.txt") << "arp 100 100 100 100\n";
    Streams s;
    REQUIRE(cmd_bandwidth({dir / "c.txt", "", dir / "r.txt"}, s.out, s.err) == kExitOk);
    CHECK(number(load_report(dir / "r.txt"), "bandwidth.arp.std") == 0.0);
}

TEST_CASE("bandwidth input errors") {
    TempDir dir;
    Streams s;
    std::ofstream(dir / "bad.txt") << "tcp 1 2 x\n";
    std::ofstream(dir / "carrier.txt") << "ipx 1 2 3\n";
    std::ofstream(dir / "ragged.txt") << "tcp 1 2 3\narp 1 2\n";
    CHECK(cmd_bandwidth({dir / "bad.txt", "", {}}, s.out, s.err) == kExitRuntime);
    CHECK(cmd_bandwidth({dir / "carrier.txt", "", {}}, s.out, s.err) == kExitRuntime);
    CHECK(cmd_bandwidth({dir / "ragged.txt", "", {}}, s.out, s.err) == kExitConfig);
    CHECK(cmd_bandwidth({dir / "missing.txt", "", {}}, s.out, s.err) == kExitRuntime);
    CHECK(cmd_bandwidth({kScenarios / "weekly_counts.txt", "tcp=-1", {}}, s.out, s.err) == kExitConfig);
    CHECK(cmd_bandwidth({kScenarios / "weekly_counts.txt", "tcp", {}}, s.out, s.err) == kExitConfig);
    CHECK(cmd_bandwidth({kScenarios / "weekly_counts.txt", "ipx=4", {}}, s.out, s.err) == kExitConfig);
}

TEST_CASE("counts and bits parsing") {
    std::istringstream in("# header\n\ntcp, 1, 2\nARP\t3 4\n");
    const auto c = parse_counts(in);
    CHECK(c.at(Carrier::TCP) == std::vector<double>{1, 2});
    CHECK(c.at(Carrier::ARP) == std::vector<double>{3, 4});
    const auto b = parse_bits("icmp=144");
    CHECK(b.at(Carrier::ICMP) == 144);
    CHECK(b.at(Carrier::TCP) == 48);
}

TEST_CASE("analyze an empty trace") {
    TempDir dir;
    write_pcap(dir / "empty.pcap", {});
    Streams s;
    REQUIRE(cmd_analyze({dir / "empty.pcap", dir / "r.txt", {}}, s.out, s.err) == kExitOk);
    const auto r = load_report(dir / "r.txt");
    CHECK(r.entries().size() > 10);
    for (const auto& [k, v] : r.entries()) {
        CAPTURE(k);
        CHECK(std::stod(v) == 0.0);
    }
}

TEST_CASE("analyze input errors") {
    TempDir dir;
    Streams s;
    CHECK(cmd_analyze({dir / "missing.pcap", {}, {}}, s.out, s.err) == kExitRuntime);
    std::ofstream(dir / "junk.pcap") << "this is not a capture file at all";
    CHECK(cmd_analyze({dir / "junk.pcap", {}, {}}, s.out, s.err) == kExitRuntime);
    write_pcap(dir / "e.pcap", {});
    CHECK(cmd_analyze({dir / "e.pcap", {}, -1.0}, s.out, s.err) == kExitConfig);
}

TEST_CASE("simulate, analyze and warden chain") {
    TempDir dir;
    Streams s;
    SimulateOptions so;
    so.scenario = kScenarios / "two_node_arp.scn";
    so.duration = 3600;
    so.pcap_out = dir / "sim.pcap";
    so.report = dir / "sim.txt";
    REQUIRE(cmd_simulate(so, s.out, s.err) == kExitOk);

    REQUIRE(cmd_analyze({dir / "sim.pcap", dir / "an.txt", 3.0}, s.out, s.err) == kExitOk);
    const auto an = load_report(dir / "an.txt");
    const double improper = number(an, "improper_frames");
    CHECK(improper > 0);
    CHECK(number(an, "protocol.tcp.improper_share") == doctest::Approx(0.9282).epsilon(0.1));
    CHECK(an.get("outliers.count") != nullptr);

    REQUIRE(cmd_warden({dir / "sim.pcap", dir / "clean.pcap", dir / "wd.txt"}, s.out, s.err) == kExitOk);
    CHECK(number(load_report(dir / "wd.txt"), "warden.frames_modified") == improper);
    REQUIRE(cmd_analyze({dir / "clean.pcap", dir / "an2.txt", {}}, s.out, s.err) == kExitOk);
    CHECK(number(load_report(dir / "an2.txt"), "improper_frames") == 0);

    REQUIRE(cmd_warden({dir / "clean.pcap", dir / "clean2.pcap", dir / "wd2.txt"}, s.out, s.err) == kExitOk);
    CHECK(number(load_report(dir / "wd2.txt"), "warden.frames_modified") == 0);
    CHECK(file_bytes(dir / "clean.pcap") == file_bytes(dir / "clean2.pcap"));
}

TEST_CASE("slow and fast goodput") {
    TempDir dir;
    Streams s;
    std::ofstream(dir / "msg.txt") << "topsecretmessage\n";
    SimulateOptions so;
    so.scenario = kScenarios / "two_node_arp.scn";
    so.message = dir / "msg.txt";
    so.mode = RunMode::Slow;
    so.report = dir / "slow.txt";
    REQUIRE(cmd_simulate(so, s.out, s.err) == kExitOk);
    so.mode = RunMode::Fast;
    so.report = dir / "fast.txt";
    REQUIRE(cmd_simulate(so, s.out, s.err) == kExitOk);
    const auto slow = load_report(dir / "slow.txt");
    const auto fast = load_report(dir / "fast.txt");
    REQUIRE(*slow.get("message.0.intact") == "true");
    REQUIRE(*fast.get("message.0.intact") == "true");
    CHECK(*slow.get("message.0.received") == "topsecretmessage");
    const double g_slow = number(slow, "message.0.goodput_bps");
    CHECK(g_slow >= 1.7);
    CHECK(g_slow <= 2.5);
    CHECK(number(fast, "message.0.goodput_bps") > g_slow);
}

TEST_CASE("simulate is deterministic") {
    TempDir dir;
    Streams s;
    SimulateOptions so;
    so.scenario = kScenarios / "hop_to_tcp.scn";
    so.seed = 1234;
    so.pcap_out = dir / "a.pcap";
    so.report = dir / "a.txt";
    REQUIRE(cmd_simulate(so, s.out, s.err) == kExitOk);
    so.pcap_out = dir / "b.pcap";
    so.report = dir / "b.txt";
    REQUIRE(cmd_simulate(so, s.out, s.err) == kExitOk);
    CHECK(file_bytes(dir / "a.txt") == file_bytes(dir / "b.txt"));
    CHECK(file_bytes(dir / "a.pcap") == file_bytes(dir / "b.pcap"));
}

TEST_CASE("simulate configuration errors") {
    TempDir dir;
    Streams s;
    std::ofstream(dir / "bad.scn") << "seed = 1\nnode.a.mac = nonsense\n";
    SimulateOptions so;
    so.scenario = dir / "bad.scn";
    CHECK(cmd_simulate(so, s.out, s.err) == kExitConfig);
    CHECK(s.err.str().find("line 2") != std::string::npos);
    so.scenario = dir / "missing.scn";
    CHECK(cmd_simulate(so, s.out, s.err) == kExitConfig);
    std::ofstream(dir / "one.scn") << "node.a.mac = 02:00:00:00:00:01\nnode.a.ip = 10.0.0.1\n";
    std::ofstream(dir / "m.txt") << "hello";
    so.scenario = dir / "one.scn";
    so.message = dir / "m.txt";
    CHECK(cmd_simulate(so, s.out, s.err) == kExitConfig);
}

TEST_CASE("selftest") {
    Streams s;
    CHECK(cmd_selftest(s.out, s.err) == kExitOk);
    CHECK(s.out.str().find("FAIL") == std::string::npos);
}

TEST_CASE("command line exit codes") {
    TempDir dir;
    std::string out;
    CHECK(run_cli("selftest", &out) == 0);
    CHECK(out.find("selftest ok") != std::string::npos);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("simulate") == 2);
    CHECK(run_cli("simulate --scenario /nonexistent.scn") == 2);
    CHECK(run_cli("simulate --scenario " + (kScenarios / "two_node_arp.scn").string() + " --mode medium") == 2);
    CHECK(run_cli("simulate --scenario " + (kScenarios / "two_node_arp.scn").string() + " --seed -3") == 2);
    CHECK(run_cli("analyze --pcap " + (dir / "missing.pcap").string()) == 1);
    CHECK(run_cli("bandwidth --counts " + (kScenarios / "weekly_counts.txt").string(), &out) == 0);
    CHECK(out.find("26.98") != std::string::npos);
    CHECK(run_cli("bandwidth --counts " + (kScenarios / "weekly_counts.txt").string() + " --bits tcp=oops") == 2);
    const auto pcap = (dir / "s.pcap").string();
    CHECK(run_cli("simulate --scenario " + (kScenarios / "two_node_arp.scn").string() + " --duration 300 --pcap-out " +
                  pcap, &out) == 0);
    CHECK(out.find("topsecretmessage") != std::string::npos);
    CHECK(run_cli("warden --in " + pcap + " --out " + (dir / "w.pcap").string(), &out) == 0);
    CHECK(out.find("frames seen") != std::string::npos);
    CHECK(run_cli("analyze --pcap " + (dir / "w.pcap").string(), &out) == 0);
    CHECK(out.find("improper 0") != std::string::npos);
    std::filesystem::remove("cli_out.txt");
    std::filesystem::remove("cli_err.txt");
}
