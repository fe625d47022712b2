#include "manet/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace manet {

std::vector<std::string> validate(const AdversaryConfig& cfg, std::uint32_t rate_limit) {
    std::vector<std::string> errors;
    if (!(cfg.malicious_fraction >= 0.0 && cfg.malicious_fraction <= 1.0)) {
        errors.emplace_back("malicious_fraction must be in [0, 1]");
    }
    if (!(cfg.tick_s > 0.0)) {
        errors.emplace_back("tick_s must be > 0");
    }
    if (cfg.malicious_fraction > 0.0 && !(cfg.flood_rate_pps > rate_limit)) {
        errors.emplace_back("flood_rate_pps must exceed the RREQ rate limit");
    }
    return errors;
}

std::uint32_t malicious_count(double fraction, std::uint32_t node_count) noexcept {
    return static_cast<std::uint32_t>(std::lround(fraction * static_cast<double>(node_count)));
}

std::vector<NodeId> select_malicious(std::uint32_t node_count, std::uint32_t count,
                                     std::uint64_t seed) {
    count = std::min(count, node_count);
    std::vector<NodeId> ids(node_count);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    Rng rng(seed, Stream::AdversarySelection);
    // Partial Fisher-Yates.
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::uint32_t>(rng.index(node_count - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<RreqPacket> adversary_tick(NodeState& node, FloodState& flood,
                                       const AdversaryConfig& cfg, std::uint32_t node_count,
                                       const AodvParams& aodv, Rng& fake_dest_rng) {
    const double owed = flood.carry + cfg.flood_rate_pps * cfg.tick_s;
    // Tolerate representation error in rate * tick (100 * 0.1 and the like).
    const auto n = static_cast<std::uint64_t>(std::floor(owed + 1e-9));
    flood.carry = std::max(0.0, owed - static_cast<double>(n));

    std::vector<RreqPacket> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        node.seq_no += 1;
        node.rreq_id_counter += 1;
        RreqPacket pkt;
        pkt.rreq_id = node.rreq_id_counter;
        pkt.origin = node.id;
        pkt.origin_seq = node.seq_no;
        pkt.dest = node_count + static_cast<NodeId>(fake_dest_rng.index(node_count));
        pkt.dest_seq = 0;
        pkt.hop_count = 0;
        pkt.ttl = aodv.initial_ttl;
        pkt.genuine = false;
        out.push_back(pkt);
    }
    return out;
}

}  // namespace manet
