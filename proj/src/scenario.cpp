#include "padsteg/scenario.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "padsteg/error.hpp"

namespace padsteg {

std::string_view run_mode_name(RunMode m) { return m == RunMode::Fast ? "fast" : "slow"; }

RunMode parse_run_mode(std::string_view s) {
    if (s == "slow") return RunMode::Slow;
    if (s == "fast") return RunMode::Fast;
    throw ConfigError("mode must be fast or slow, got '" + std::string(s) + "'");
}

const NodeSpec* Scenario::find_node(std::string_view name) const {
    for (const auto& n : nodes)
        if (n.name == name) return &n;
    return nullptr;
}

void Scenario::validate() const {
    if (!(duration >= 0)) throw ConfigError("duration must be non-negative");
    if (latency < 0) throw ConfigError("latency must be non-negative");
    if (background) background->validate();
    for (std::size_t i = 0; i < nodes.size(); ++i) effective_config(*this, i).validate();
    for (const auto& m : messages) {
        if (!find_node(m.from)) throw ConfigError("message " + m.id + ": unknown sender '" + m.from + "'");
        if (!find_node(m.to)) throw ConfigError("message " + m.id + ": unknown receiver '" + m.to + "'");
        if (m.from == m.to) throw ConfigError("message " + m.id + ": sender and receiver are the same node");
        if (m.at < 0) throw ConfigError("message " + m.id + ": negative start time");
        if (!terminator_frames_cleanly(m.text, find_node(m.from)->config.terminator))
            throw ConfigError("message " + m.id + ": text contains the message terminator");
    }
    for (const auto& h : hops) {
        if (!find_node(h.from) || !find_node(h.to)) throw ConfigError("hop references an unknown node");
        if (h.at < 0) throw ConfigError("hop at negative time");
    }
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::vector<std::string> words(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

double to_double(const std::string& v) {
    double d = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError("not a number: '" + v + "'");
    return d;
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError("not an unsigned integer: '" + v + "'");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("not a boolean: '" + v + "'");
}

CarrierProtocolId to_pid(const std::string& v) {
    if (auto c = parse_carrier(v)) {
        if (auto pid = CarrierProtocolId::for_carrier(*c)) return *pid;
        throw ConfigError("carrier '" + v + "' has no protocol id");
    }
    const auto n = to_u64(v);
    if (n == 0 || n > 255) throw ConfigError("protocol id out of range: " + v);
    return CarrierProtocolId(static_cast<std::uint8_t>(n));
}

template <std::size_t N>
std::array<double, N> to_mix(const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != N) throw ConfigError("expected " + std::to_string(N) + " comma-separated values");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = to_double(parts[i]);
    return out;
}

Carrier to_carrier(const std::string& v) {
    auto c = parse_carrier(v);
    if (!c) throw ConfigError("unknown carrier '" + v + "'");
    return *c;
}

template <typename F>
auto wrap(F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

class Parser {
public:
    void line(const std::string& key, const std::string& value);
    Scenario finish() { return std::move(s_); }

private:
    BackgroundProfile& bg() {
        if (!s_.background) s_.background.emplace();
        return *s_.background;
    }
    NodeSpec& node(const std::string& name) {
        for (auto& n : s_.nodes)
            if (n.name == name) return n;
        NodeSpec n;
        n.name = name;
        s_.nodes.push_back(std::move(n));
        return s_.nodes.back();
    }
    MessageSpec& message(const std::string& id) {
        for (auto& m : s_.messages)
            if (m.id == id) return m;
        s_.messages.push_back({id, {}, {}, {}, 0});
        return s_.messages.back();
    }
    void node_key(NodeSpec& n, const std::string& field, const std::string& v);
    void background_key(const std::string& field, const std::string& v);

    Scenario s_;
};

void Parser::background_key(const std::string& f, const std::string& v) {
    auto& p = bg();
    if (f == "n_hosts") p.n_hosts = to_u64(v);
    else if (f == "vulnerable_fraction") p.vulnerable_fraction = to_double(v);
    else if (f == "improper_given_padded") p.improper_given_padded = to_double(v);
    else if (f == "padded_fraction") p.padded_fraction = to_double(v);
    else if (f == "frames_per_day") p.frames_per_day = to_double(v);
    else if (f == "protocol_mix") p.protocol_mix = to_mix<5>(v);
    else if (f == "arp_op_mix") p.arp_op_mix = to_mix<3>(v);
    else if (f == "pattern_mix") p.pattern_mix = to_mix<kPatternCount>(v);
    else if (f == "icmp_payload_len") p.icmp_payload_len = to_u64(v);
    else if (f == "base_ip") p.base_ip = Ipv4Address::parse(v);
    else throw ConfigError("unknown key background." + f);
}

void Parser::node_key(NodeSpec& n, const std::string& f, const std::string& v) {
    auto& c = n.config;
    if (f == "mac") c.mac = MacAddress::parse(v);
    else if (f == "ip") c.ip = Ipv4Address::parse(v);
    else if (f == "pid") c.own_pid = to_pid(v);
    else if (f == "t_init") c.t_init = to_double(v);
    else if (f == "t_data") c.t_data = to_double(v), n.t_data_set = true;
    else if (f == "expiry") c.expiry = to_double(v);
    else if (f == "start") n.start = from_seconds(to_double(v));
    else if (f == "seed") c.rng_seed = to_u64(v), n.rng_seed_set = true;
    else if (f == "advert_target") c.advert_target = Ipv4Address::parse(v);
    else if (f == "tcp_src_port") c.tcp_src_port = static_cast<std::uint16_t>(to_u64(v));
    else if (f == "tcp_dst_port") c.tcp_dst_port = static_cast<std::uint16_t>(to_u64(v));
    else if (f == "pid_order") {
        c.pid_order.clear();
        for (const auto& p : split(v, ',')) c.pid_order.push_back(to_pid(p));
    } else if (f == "rate_budget") {
        if (v != "none") throw ConfigError("rate_budget accepts only 'none'; use rate_budget.<carrier>");
        c.rate_budget.clear();
        n.rate_budget_set = true;
    } else if (f.starts_with("rate_budget.")) {
        if (!n.rate_budget_set) c.rate_budget.clear();
        n.rate_budget_set = true;
        c.rate_budget[to_carrier(f.substr(12))] = to_double(v);
    } else {
        throw ConfigError("unknown key node." + n.name + "." + f);
    }
}

void Parser::line(const std::string& key, const std::string& v) {
    if (key == "seed") s_.seed = to_u64(v);
    else if (key == "duration") s_.duration = to_double(v);
    else if (key == "mode") s_.mode = parse_run_mode(v);
    else if (key == "switch") {
        if (v == "switch") s_.switching = SwitchMode::Switch;
        else if (v == "hub") s_.switching = SwitchMode::Hub;
        else throw ConfigError("switch must be switch or hub");
    } else if (key == "latency_us") s_.latency = static_cast<VirtualTime>(to_u64(v));
    else if (key == "warden") s_.warden = to_bool(v);
    else if (key == "background") {
        if (to_bool(v)) bg();
        else s_.background.reset();
    } else if (key.starts_with("background.")) {
        background_key(key.substr(11), v);
    } else if (key.starts_with("node.")) {
        const auto rest = key.substr(5);
        const auto dot = rest.find('.');
        if (dot == std::string::npos || dot == 0) throw ConfigError("expected node.<name>.<field>");
        node_key(node(rest.substr(0, dot)), rest.substr(dot + 1), v);
    } else if (key.starts_with("message.")) {
        const auto rest = key.substr(8);
        const auto dot = rest.rfind('.');
        const std::string id = dot == std::string::npos ? "" : rest.substr(0, dot);
        const std::string field = dot == std::string::npos ? rest : rest.substr(dot + 1);
        auto& m = message(id);
        if (field == "from") m.from = v;
        else if (field == "to") m.to = v;
        else if (field == "text") m.text = to_bytes(v);
        else if (field == "hex") m.text = from_hex(v);
        else if (field == "at") m.at = to_double(v);
        else throw ConfigError("unknown key " + key);
    } else if (key.starts_with("hop.")) {
        const auto w = words(v);
        if (w.size() != 4) throw ConfigError("hop expects: <seconds> <from> <to> <pid>");
        s_.hops.push_back({to_double(w[0]), w[1], w[2], to_pid(w[3])});
    } else {
        throw ConfigError("unknown key " + key);
    }
}

}  // namespace

Scenario parse_scenario(std::istream& is) {
    Parser p;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string t = trim(raw);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        try {
            if (eq == std::string::npos) throw ConfigError("expected key = value");
            const std::string key = trim(std::string_view(t).substr(0, eq));
            if (key.empty()) throw ConfigError("empty key");
            wrap([&] {
                p.line(key, trim(std::string_view(t).substr(eq + 1)));
                return 0;
            });
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    Scenario s = p.finish();
    wrap([&] {
        s.validate();
        return 0;
    });
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario " + path.string());
    try {
        return parse_scenario(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

NodeConfig effective_config(const Scenario& s, std::size_t i) {
    const NodeSpec& n = s.nodes.at(i);
    NodeConfig c = n.config;
    if (!n.t_data_set) c.t_data = s.mode == RunMode::Fast ? 1.0 : 60.0;
    if (!n.rate_budget_set) {
        if (s.mode == RunMode::Fast) c.rate_budget.clear();
        else c.rate_budget = default_rate_budgets();
    }
    if (!n.rng_seed_set) c.rng_seed = splitmix64(s.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    return c;
}

ScenarioRun build_simulator(const Scenario& s) {
    s.validate();
    SimConfig cfg;
    cfg.seed = s.seed;
    cfg.switching = s.switching;
    cfg.latency = s.latency;
    cfg.background = s.background;
    ScenarioRun run;
    run.sim = std::make_unique<Simulator>(std::move(cfg));
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        run.handles[s.nodes[i].name] = run.sim->attach_node(effective_config(s, i), s.nodes[i].name, s.nodes[i].start);
    for (const auto& m : s.messages)
        run.sim->schedule_message(run.handles.at(m.from), run.handles.at(m.to), m.text, from_seconds(m.at));
    for (const auto& h : s.hops)
        run.sim->schedule_hop(from_seconds(h.at), run.handles.at(h.from), run.handles.at(h.to), h.pid);
    if (s.warden) {
        run.warden = std::make_shared<InlineWarden>();
        run.sim->set_transformer(run.warden->transformer());
    }
    return run;
}

}  // namespace padsteg
