#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "padsteg/frame.hpp"
#include "padsteg/scenario.hpp"

namespace padsteg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

struct SimulateOptions {
    std::filesystem::path scenario;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::optional<std::filesystem::path> pcap_out;
    std::optional<RunMode> mode;
    std::optional<std::filesystem::path> message;
    std::optional<std::filesystem::path> report;
};

struct AnalyzeOptions {
    std::filesystem::path pcap;
    std::optional<std::filesystem::path> report;
    std::optional<double> flag_outliers;
};

struct BandwidthOptions {
    std::filesystem::path counts;
    std::string bits;  // "tcp=48,arp=144" style overrides of the defaults
    std::optional<std::filesystem::path> report;
};

struct WardenOptions {
    std::filesystem::path in;
    std::filesystem::path out;
    std::optional<std::filesystem::path> report;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err);
int cmd_bandwidth(const BandwidthOptions& o, std::ostream& out, std::ostream& err);
int cmd_warden(const WardenOptions& o, std::ostream& out, std::ostream& err);
int cmd_selftest(std::ostream& out, std::ostream& err);

/// One line per carrier: name followed by per-day counts. Throws FormatError.
std::map<Carrier, std::vector<double>> parse_counts(std::istream& is);
/// Overrides applied on top of default_padding_bits(). Throws ConfigError.
std::map<Carrier, double> parse_bits(std::string_view text);

}  // namespace padsteg
