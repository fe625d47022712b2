#include "manet/netmodel.hpp"

#include <algorithm>
#include <cassert>

namespace manet {

bool RoutingTable::update(RoutingTableEntry candidate, SimTime now, SimTime lifetime) {
    assert(candidate.hop_count >= 1);
    if (candidate.next_hop == owner_ || candidate.dest == owner_) {
        return false;
    }
    auto it = entries_.find(candidate.dest);
    if (it != entries_.end() && it->second.usable_at(now)) {
        const auto& cur = it->second;
        const bool fresher = candidate.dest_seq > cur.dest_seq;
        const bool shorter =
            candidate.dest_seq == cur.dest_seq && candidate.hop_count < cur.hop_count;
        if (!fresher && !shorter) {
            return false;
        }
    }
    candidate.expires_at = now + lifetime;
    entries_.insert_or_assign(candidate.dest, candidate);
    return true;
}

std::optional<RoutingTableEntry> RoutingTable::lookup(NodeId dest, SimTime now) const {
    auto it = entries_.find(dest);
    if (it == entries_.end() || !it->second.usable_at(now)) {
        return std::nullopt;
    }
    return it->second;
}

void RoutingTable::refresh(NodeId dest, SimTime now, SimTime lifetime) {
    auto it = entries_.find(dest);
    if (it != entries_.end() && it->second.usable_at(now)) {
        it->second.expires_at = std::max(it->second.expires_at, now + lifetime);
    }
}

bool routing_table_update(RoutingTable& table, const RoutingTableEntry& candidate,
                          SimTime now, SimTime lifetime) {
    return table.update(candidate, now, lifetime);
}

std::optional<RoutingTableEntry> route_lookup(const RoutingTable& table, NodeId dest,
                                              SimTime now) {
    return table.lookup(dest, now);
}

}  // namespace manet
