#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "padsteg/sim.hpp"
#include "padsteg/warden.hpp"

namespace padsteg {

enum class RunMode { Slow, Fast };

std::string_view run_mode_name(RunMode m);
/// Throws ConfigError.
RunMode parse_run_mode(std::string_view s);

struct NodeSpec {
    std::string name;
    NodeConfig config;
    VirtualTime start = 0;
    bool rng_seed_set = false;
    bool t_data_set = false;
    bool rate_budget_set = false;
};

struct MessageSpec {
    std::string id;
    std::string from;
    std::string to;
    Bytes text;
    double at = 0;  // seconds
};

struct HopSpec {
    double at = 0;
    std::string from;
    std::string to;
    CarrierProtocolId pid = CarrierProtocolId::tcp();
};

struct Scenario {
    std::uint64_t seed = 1;
    double duration = 600;  // seconds
    RunMode mode = RunMode::Slow;
    SwitchMode switching = SwitchMode::Switch;
    VirtualTime latency = 0;
    bool warden = false;
    std::optional<BackgroundProfile> background;
    std::vector<NodeSpec> nodes;
    std::vector<MessageSpec> messages;
    std::vector<HopSpec> hops;

    const NodeSpec* find_node(std::string_view name) const;
    /// Cross-checks references and node configs. Throws ConfigError.
    void validate() const;
};

/// Line-based `key = value`; '#' starts a comment line. Throws ConfigError
/// with the offending line number.
Scenario parse_scenario(std::istream& is);
Scenario load_scenario(const std::filesystem::path& path);

/// Node config after applying the run mode: slow keeps the per-day rate
/// budgets and t_data = 60 s, fast drops budgets and uses t_data = 1 s.
/// Values set explicitly in the scenario win.
NodeConfig effective_config(const Scenario& s, std::size_t node_index);

struct ScenarioRun {
    std::unique_ptr<Simulator> sim;
    std::map<std::string, NodeHandle> handles;
    std::shared_ptr<InlineWarden> warden;
};

ScenarioRun build_simulator(const Scenario& s);

}  // namespace padsteg
