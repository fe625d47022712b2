#pragma once

// Flooding adversaries: nodes that ignore RREQ_RATELIMIT and originate
// fabricated route requests for destinations nobody can answer.

#include <cstdint>
#include <string>
#include <vector>

#include "manet/aodv.hpp"
#include "manet/netmodel.hpp"
#include "manet/rng.hpp"

namespace manet {

struct AdversaryConfig {
    double malicious_fraction = 0.0;
    double flood_rate_pps = 100.0;
    double tick_s = 0.1;
};

std::vector<std::string> validate(const AdversaryConfig& cfg, std::uint32_t rate_limit);

// round(fraction * node_count), halves rounded away from zero.
std::uint32_t malicious_count(double fraction, std::uint32_t node_count) noexcept;

// Picks `count` distinct nodes with the AdversarySelection stream; sorted.
std::vector<NodeId> select_malicious(std::uint32_t node_count, std::uint32_t count,
                                     std::uint64_t seed);

// Per-flooder state carried between ticks.
struct FloodState {
    double carry = 0.0;  // fractional packets owed from earlier ticks
};

// Fabricated RREQs for one tick of length cfg.tick_s. They bypass the node's
// RREQ budget and target ids in [node_count, 2 * node_count).
std::vector<RreqPacket> adversary_tick(NodeState& node, FloodState& flood,
                                       const AdversaryConfig& cfg, std::uint32_t node_count,
                                       const AodvParams& aodv, Rng& fake_dest_rng);

}  // namespace manet
