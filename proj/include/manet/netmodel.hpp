#pragma once

// Shared domain types: node ids, control/data packets and the AODV route table.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <variant>

namespace manet {

using NodeId = std::uint32_t;
using SeqNo = std::uint32_t;
using SimTime = double;  // seconds

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

// Real nodes live in [0, node_count); anything at or above node_count is a
// fabricated destination that no node will ever answer for.
constexpr bool is_fabricated(NodeId id, std::uint32_t node_count) noexcept {
    return id >= node_count;
}

struct RreqPacket {
    std::uint32_t rreq_id = 0;
    NodeId origin = kNoNode;
    SeqNo origin_seq = 0;
    NodeId dest = kNoNode;
    SeqNo dest_seq = 0;  // 0 when unknown
    std::uint32_t hop_count = 0;
    std::uint32_t ttl = 0;
    // Ground-truth label for accounting only. Protocol code never reads it.
    bool genuine = true;

    // Copy as seen by the next hop. Only valid for ttl > 0.
    RreqPacket rebroadcast() const {
        RreqPacket next = *this;
        next.hop_count += 1;
        next.ttl -= 1;
        return next;
    }

    friend bool operator==(const RreqPacket&, const RreqPacket&) = default;
};

struct RrepPacket {
    NodeId origin = kNoNode;  // node that asked for the route
    NodeId dest = kNoNode;    // node the route leads to
    SeqNo dest_seq = 0;
    std::uint32_t hop_count = 0;

    friend bool operator==(const RrepPacket&, const RrepPacket&) = default;
};

struct DataPacket {
    std::uint32_t flow_id = 0;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    std::uint32_t size_bytes = 1000;

    friend bool operator==(const DataPacket&, const DataPacket&) = default;
};

using Packet = std::variant<RreqPacket, RrepPacket, DataPacket>;

enum class PacketKind : std::uint8_t { Rreq, Rrep, Data };

inline PacketKind kind_of(const Packet& p) noexcept {
    return static_cast<PacketKind>(p.index());
}

struct RoutingTableEntry {
    NodeId dest = kNoNode;
    NodeId next_hop = kNoNode;
    std::uint32_t hop_count = 1;
    SeqNo dest_seq = 0;
    SimTime expires_at = 0.0;

    // Validity is the half-open interval [installed, expires_at).
    bool usable_at(SimTime now) const noexcept { return now < expires_at; }
};

class RoutingTable {
public:
    explicit RoutingTable(NodeId owner = kNoNode) : owner_(owner) {}

    NodeId owner() const noexcept { return owner_; }

    // Installs `candidate` if it is fresher (greater dest_seq) or equally fresh
    // and shorter than the current entry. Expired entries count as absent.
    // On success the entry lives until now + lifetime.
    bool update(RoutingTableEntry candidate, SimTime now, SimTime lifetime);

    std::optional<RoutingTableEntry> lookup(NodeId dest, SimTime now) const;

    // Pushes expires_at to at least now + lifetime for a usable entry.
    void refresh(NodeId dest, SimTime now, SimTime lifetime);

    void invalidate(NodeId dest) { entries_.erase(dest); }

    std::size_t size() const noexcept { return entries_.size(); }

    const std::unordered_map<NodeId, RoutingTableEntry>& entries() const noexcept {
        return entries_;
    }

private:
    NodeId owner_;
    std::unordered_map<NodeId, RoutingTableEntry> entries_;
};

// Free-function forms of the table operations.
bool routing_table_update(RoutingTable& table, const RoutingTableEntry& candidate,
                          SimTime now, SimTime lifetime);
std::optional<RoutingTableEntry> route_lookup(const RoutingTable& table, NodeId dest,
                                              SimTime now);

}  // namespace manet
