#pragma once

// Experiment description and its text format.
//
// A scenario file is a list of `section.key = value` lines. `#` starts a
// comment, blank lines are ignored, keys may appear at most once. Every key
// has a default, so an empty file is the desk-scale preset. See README.md for
// the full key list.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manet/adversary.hpp"
#include "manet/aodv.hpp"
#include "manet/channel.hpp"
#include "manet/flood_control.hpp"
#include "manet/mobility.hpp"

namespace manet {

struct TrafficParams {
    std::uint32_t flow_count = 10;
    double data_rate_pps = 10.0;
    std::uint32_t packet_bytes = 1000;
    double start_window_s = 5.0;  // flow starts are uniform in [0, window)
};

struct MotionParams {
    double v_min = 10.0;
    double v_max = 10.0;
    double pause_s = 2.0;
};

struct ScenarioConfig {
    std::string name = "desk";
    double width_m = 1000.0;
    double height_m = 1000.0;
    std::uint32_t node_count = 50;
    double sim_time_s = 50.0;
    Policy policy = Policy::Acrr;
    PolicyParams policy_params;
    AdversaryConfig adversary;
    MotionParams motion;
    TrafficParams traffic;
    ChannelParams channel;
    AodvParams aodv;
    std::uint32_t replications = 10;
    std::uint64_t base_seed = 1;

    MobilityParams mobility() const {
        return {width_m, height_m, motion.v_min, motion.v_max, motion.pause_s};
    }
};

// Problem with one field, addressed by its dotted key.
struct ConfigIssue {
    std::string path;
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    explicit ConfigError(ConfigIssue issue);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

// Keys accepted by set_field, in echo order. Aliases (mobility.speed) are not listed.
const std::vector<std::string_view>& config_keys();

// Sets one field from its text form. Throws ConfigError on unknown keys and
// malformed values.
void set_field(ScenarioConfig& cfg, std::string_view key, std::string_view value);

// Current value of a listed key in its text form.
std::string get_field(const ScenarioConfig& cfg, std::string_view key);

// Parses `key = value` text on top of `base`. Throws ConfigError with the line
// number in each message.
ScenarioConfig parse_config(std::string_view text, const ScenarioConfig& base = {});
ScenarioConfig load_config(const std::string& path, const ScenarioConfig& base = {});

// Applies a `key=value` override (the CLI's --set).
void apply_override(ScenarioConfig& cfg, std::string_view assignment);

// Empty when the config can be run.
std::vector<ConfigIssue> validate(const ScenarioConfig& cfg);

// Full resolved config in the file format; parse_config(to_text(c)) == c.
std::string to_text(const ScenarioConfig& cfg);

// "desk" (1000 m x 1000 m, 50 nodes) or "table1" (5000 m x 1000 m, 450 nodes).
std::optional<ScenarioConfig> preset(std::string_view name);

}  // namespace manet
