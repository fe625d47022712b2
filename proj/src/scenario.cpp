#include "manet/scenario.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "manet/metrics.hpp"

namespace manet {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::string out;
    for (const auto& i : issues) {
        if (!out.empty()) out += '\n';
        out += i.path.empty() ? i.message : i.path + ": " + i.message;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view expected,
                            std::string_view value) {
    throw ConfigError(ConfigIssue{std::string(key), fmt::format("expected {}, got '{}'", expected, value)});
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        if constexpr (std::is_floating_point_v<T>) {
            bad_value(key, "a number", value);
        } else {
            bad_value(key, "a non-negative integer", value);
        }
    }
    return out;
}

struct Field {
    std::string_view key;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T, typename Access>
Field number(std::string_view key, Access access) {
    return Field{
        key,
        [key, access](ScenarioConfig& c, std::string_view v) {
            access(c) = parse_number<T>(key, v);
        },
        [access](const ScenarioConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
                return format_number(access(c));
            } else {
                return std::to_string(access(c));
            }
        },
    };
}

const std::vector<Field>& fields() {
    using C = ScenarioConfig;
    static const std::vector<Field> table{
        Field{"scenario.name",
              [](C& c, std::string_view v) {
                  if (v.empty() || v.find_first_of(" \t,") != std::string_view::npos) {
                      bad_value("scenario.name", "a name without spaces or commas", v);
                  }
                  c.name = std::string(v);
              },
              [](const C& c) { return c.name; }},
        number<double>("arena.width_m", [](auto& c) -> auto& { return c.width_m; }),
        number<double>("arena.height_m", [](auto& c) -> auto& { return c.height_m; }),
        number<std::uint32_t>("nodes.count", [](auto& c) -> auto& { return c.node_count; }),
        number<double>("sim.time_s", [](auto& c) -> auto& { return c.sim_time_s; }),
        Field{"policy.name",
              [](C& c, std::string_view v) {
                  auto p = parse_policy(v);
                  if (!p) bad_value("policy.name", "one of none, naive, acrr", v);
                  c.policy = *p;
              },
              [](const C& c) { return std::string(to_string(c.policy)); }},
        number<std::uint32_t>("policy.R", [](auto& c) -> auto& { return c.policy_params.R; }),
        number<double>("policy.k", [](auto& c) -> auto& { return c.policy_params.k; }),
        number<double>("policy.alpha", [](auto& c) -> auto& { return c.policy_params.alpha; }),
        number<double>("policy.interval_s",
                       [](auto& c) -> auto& { return c.policy_params.interval_len; }),
        number<double>("policy.bt_base_s", [](auto& c) -> auto& { return c.policy_params.bt_base; }),
        number<double>("policy.bt_factor",
                       [](auto& c) -> auto& { return c.policy_params.bt_factor; }),
        number<double>("policy.bt_cap_s", [](auto& c) -> auto& { return c.policy_params.bt_cap; }),
        number<std::uint32_t>("policy.ral",
                              [](auto& c) -> auto& { return c.policy_params.ral; }),
        number<std::uint32_t>("policy.rbl",
                              [](auto& c) -> auto& { return c.policy_params.rbl; }),
        number<double>("adversary.malicious_fraction",
                       [](auto& c) -> auto& { return c.adversary.malicious_fraction; }),
        number<double>("adversary.flood_rate_pps",
                       [](auto& c) -> auto& { return c.adversary.flood_rate_pps; }),
        number<double>("adversary.tick_s", [](auto& c) -> auto& { return c.adversary.tick_s; }),
        number<double>("mobility.v_min", [](auto& c) -> auto& { return c.motion.v_min; }),
        number<double>("mobility.v_max", [](auto& c) -> auto& { return c.motion.v_max; }),
        number<double>("mobility.pause_s", [](auto& c) -> auto& { return c.motion.pause_s; }),
        number<std::uint32_t>("traffic.flow_count",
                              [](auto& c) -> auto& { return c.traffic.flow_count; }),
        number<double>("traffic.data_rate_pps",
                       [](auto& c) -> auto& { return c.traffic.data_rate_pps; }),
        number<std::uint32_t>("traffic.packet_bytes",
                              [](auto& c) -> auto& { return c.traffic.packet_bytes; }),
        number<double>("traffic.start_window_s",
                       [](auto& c) -> auto& { return c.traffic.start_window_s; }),
        number<double>("channel.range_m", [](auto& c) -> auto& { return c.channel.range_m; }),
        number<double>("channel.capacity_pps",
                       [](auto& c) -> auto& { return c.channel.capacity_pps; }),
        number<double>("channel.prop_delay_s",
                       [](auto& c) -> auto& { return c.channel.prop_delay_s; }),
        number<std::uint32_t>("channel.queue_limit",
                              [](auto& c) -> auto& { return c.channel.queue_limit; }),
        number<std::uint32_t>("aodv.ttl", [](auto& c) -> auto& { return c.aodv.initial_ttl; }),
        number<double>("aodv.discovery_timeout_s",
                       [](auto& c) -> auto& { return c.aodv.discovery_timeout; }),
        number<std::uint32_t>("aodv.rreq_retries",
                              [](auto& c) -> auto& { return c.aodv.rreq_retries; }),
        number<double>("aodv.seen_expiry_s", [](auto& c) -> auto& { return c.aodv.seen_expiry; }),
        number<double>("aodv.route_lifetime_s",
                       [](auto& c) -> auto& { return c.aodv.route_lifetime; }),
        number<std::uint32_t>("run.replications",
                              [](auto& c) -> auto& { return c.replications; }),
        number<std::uint64_t>("run.base_seed", [](auto& c) -> auto& { return c.base_seed; }),
    };
    return table;
}

const Field* find_field(std::string_view key) {
    for (const auto& f : fields()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigError::ConfigError(ConfigIssue issue) : ConfigError(std::vector<ConfigIssue>{std::move(issue)}) {}

const std::vector<std::string_view>& config_keys() {
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> out;
        for (const auto& f : fields()) out.push_back(f.key);
        return out;
    }();
    return keys;
}

void set_field(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
    if (key == "mobility.speed") {
        const auto v = parse_number<double>(key, value);
        cfg.motion.v_min = v;
        cfg.motion.v_max = v;
        return;
    }
    const auto* f = find_field(key);
    if (f == nullptr) {
        throw ConfigError(ConfigIssue{std::string(key), "unknown key"});
    }
    f->set(cfg, value);
}

std::string get_field(const ScenarioConfig& cfg, std::string_view key) {
    const auto* f = find_field(key);
    if (f == nullptr) {
        throw ConfigError(ConfigIssue{std::string(key), "unknown key"});
    }
    return f->get(cfg);
}

ScenarioConfig parse_config(std::string_view text, const ScenarioConfig& base) {
    ScenarioConfig cfg = base;
    std::vector<ConfigIssue> issues;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.push_back({fmt::format("line {}", line_no), "expected 'key = value'"});
            continue;
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!seen.emplace(key).second) {
            issues.push_back({std::string(key), fmt::format("line {}: duplicate key", line_no)});
            continue;
        }
        try {
            set_field(cfg, key, value);
        } catch (const ConfigError& e) {
            for (const auto& i : e.issues()) {
                issues.push_back({i.path, fmt::format("line {}: {}", line_no, i.message)});
            }
        }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

ScenarioConfig load_config(const std::string& path, const ScenarioConfig& base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(ConfigIssue{path, "cannot open config file"});
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

void apply_override(ScenarioConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(ConfigIssue{std::string(assignment), "override must look like key=value"});
    }
    set_field(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::vector<ConfigIssue> validate(const ScenarioConfig& c) {
    std::vector<ConfigIssue> out;
    auto require = [&out](bool ok, std::string_view path, std::string_view msg) {
        if (!ok) out.push_back({std::string(path), std::string(msg)});
    };
    require(c.width_m > 0.0, "arena.width_m", "must be > 0");
    require(c.height_m > 0.0, "arena.height_m", "must be > 0");
    require(c.node_count >= 1, "nodes.count", "must be >= 1");
    require(c.sim_time_s >= 0.0, "sim.time_s", "must be >= 0");

    const auto& p = c.policy_params;
    require(p.R >= 1, "policy.R", "must be >= 1");
    require(p.k > 0.0, "policy.k", "must be > 0");
    require(p.alpha > 0.0 && p.alpha <= 1.0, "policy.alpha", "must be in (0, 1]");
    require(p.interval_len > 0.0, "policy.interval_s", "must be > 0");
    require(p.bt_base > 0.0, "policy.bt_base_s", "must be > 0");
    require(p.bt_factor >= 1.0, "policy.bt_factor", "must be >= 1");
    require(p.bt_cap >= p.bt_base, "policy.bt_cap_s", "must be >= policy.bt_base_s");
    require(p.ral <= p.rbl, "policy.ral", "must be <= policy.rbl");

    const auto& a = c.adversary;
    require(a.malicious_fraction >= 0.0 && a.malicious_fraction <= 1.0,
            "adversary.malicious_fraction", "must be in [0, 1]");
    require(a.tick_s > 0.0, "adversary.tick_s", "must be > 0");
    require(a.malicious_fraction == 0.0 || a.flood_rate_pps > p.R, "adversary.flood_rate_pps",
            "must exceed policy.R (a flooder that respects the limit is not flooding)");

    require(c.motion.v_min >= 0.0, "mobility.v_min", "must be >= 0");
    require(c.motion.v_max >= c.motion.v_min, "mobility.v_max", "must be >= mobility.v_min");
    require(c.motion.pause_s >= 0.0, "mobility.pause_s", "must be >= 0");

    require(c.traffic.data_rate_pps > 0.0, "traffic.data_rate_pps", "must be > 0");
    require(c.traffic.packet_bytes > 0, "traffic.packet_bytes", "must be > 0");
    require(c.traffic.start_window_s >= 0.0, "traffic.start_window_s", "must be >= 0");

    require(c.channel.range_m > 0.0, "channel.range_m", "must be > 0");
    require(c.channel.capacity_pps > 0.0, "channel.capacity_pps", "must be > 0");
    require(c.channel.prop_delay_s > 0.0, "channel.prop_delay_s", "must be > 0");
    require(c.channel.queue_limit >= 1, "channel.queue_limit", "must be >= 1");

    require(c.aodv.initial_ttl >= 1, "aodv.ttl", "must be >= 1");
    require(c.aodv.discovery_timeout > 0.0, "aodv.discovery_timeout_s", "must be > 0");
    require(c.aodv.seen_expiry > 0.0, "aodv.seen_expiry_s", "must be > 0");
    require(c.aodv.route_lifetime > 0.0, "aodv.route_lifetime_s", "must be > 0");

    require(c.replications >= 1, "run.replications", "must be >= 1");
    return out;
}

std::string to_text(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) {
        out += fmt::format("{} = {}\n", f.key, f.get(cfg));
    }
    return out;
}

std::optional<ScenarioConfig> preset(std::string_view name) {
    if (name == "desk") {
        return ScenarioConfig{};
    }
    if (name == "table1") {
        ScenarioConfig c;
        c.name = "table1";
        c.width_m = 5000.0;
        c.height_m = 1000.0;
        c.node_count = 450;
        c.traffic.flow_count = 100;
        return c;
    }
    return std::nullopt;
}

}  // namespace manet
