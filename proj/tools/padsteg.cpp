#include <iostream>

#include "CLI11.hpp"
#include "padsteg/commands.hpp"
#include "padsteg/error.hpp"

using namespace padsteg;

int main(int argc, char** argv) {
    CLI::App app{"Ethernet frame padding covert channel toolkit"};
    app.require_subcommand(1, 1);

    SimulateOptions sim;
    std::string mode;
    std::string seed;
    auto* s = app.add_subcommand("simulate", "run a LAN simulation from a scenario file");
    s->add_option("--scenario", sim.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    s->add_option("--seed", seed, "override the scenario seed");
    s->add_option("--duration", sim.duration, "virtual seconds to simulate");
    s->add_option("--pcap-out", sim.pcap_out, "write every emitted frame to this pcap");
    s->add_option("--mode", mode, "fast or slow")->check(CLI::IsMember({"fast", "slow"}));
    s->add_option("--message", sim.message, "file whose contents replace the scenario messages");
    s->add_option("--report", sim.report, "key = value summary output");

    AnalyzeOptions an;
    auto* a = app.add_subcommand("analyze", "padding statistics of a pcap trace");
    a->add_option("--pcap", an.pcap, "input trace")->required();
    a->add_option("--report", an.report, "key = value summary output");
    a->add_option("--flag-outliers", an.flag_outliers, "flag hosts beyond this many standard deviations");

    BandwidthOptions bw;
    bw.bits = "tcp=48,arp=144,icmp=48";
    auto* b = app.add_subcommand("bandwidth", "steganographic bandwidth from daily frame counts");
    b->add_option("--counts", bw.counts, "carrier name followed by per-day counts, one carrier per line")->required();
    b->add_option("--bits", bw.bits, "bits per frame, e.g. tcp=48,arp=144,icmp=48")->capture_default_str();
    b->add_option("--report", bw.report, "key = value summary output");

    WardenOptions wd;
    auto* w = app.add_subcommand("warden", "zero the padding of every frame in a trace");
    w->add_option("--in", wd.in, "input trace")->required();
    w->add_option("--out", wd.out, "sanitized trace")->required();
    w->add_option("--report", wd.report, "key = value summary output");

    auto* t = app.add_subcommand("selftest", "quick built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (s->parsed()) {
        if (!mode.empty()) sim.mode = mode == "fast" ? RunMode::Fast : RunMode::Slow;
        if (!seed.empty()) {
            try {
                std::size_t used = 0;
                if (seed.starts_with('-')) throw std::invalid_argument(seed);
                sim.seed = std::stoull(seed, &used, 0);
                if (used != seed.size()) throw std::invalid_argument(seed);
            } catch (const std::exception&) {
                std::cerr << "error: --seed expects an unsigned 64-bit integer\n";
                return kExitConfig;
            }
        }
        return cmd_simulate(sim, std::cout, std::cerr);
    }
    if (a->parsed()) return cmd_analyze(an, std::cout, std::cerr);
    if (b->parsed()) return cmd_bandwidth(bw, std::cout, std::cerr);
    if (w->parsed()) return cmd_warden(wd, std::cout, std::cerr);
    if (t->parsed()) return cmd_selftest(std::cout, std::cerr);
    return kExitConfig;
}
