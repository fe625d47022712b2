#pragma once

// Per-node AODV route discovery with a pluggable RREQ admission policy.
//
// Handlers are pure state transitions on a NodeState: they return what the
// node wants to transmit and why, and leave the channel and the accounting
// to the simulation kernel.

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>

#include "manet/flood_control.hpp"
#include "manet/netmodel.hpp"

namespace manet {

struct AodvParams {
    std::uint32_t initial_ttl = 30;
    double discovery_timeout = 1.0;   // seconds to wait for an RREP
    std::uint32_t rreq_retries = 2;   // re-originations after the first attempt
    double seen_expiry = 5.0;         // duplicate-suppression window, seconds
    double route_lifetime = 10.0;     // active route lifetime, refreshed on use
};

struct PendingDiscovery {
    SimTime requested_at = 0.0;   // first attempt; latency is measured from here
    std::uint32_t attempts = 0;   // RREQs actually emitted for this discovery
    std::uint32_t last_rreq_id = 0;
    bool deferred = false;        // waiting for the next interval's budget
};

struct NodeState {
    NodeId id = kNoNode;
    bool malicious = false;
    Policy policy = Policy::None;
    SeqNo seq_no = 0;
    std::uint32_t rreq_id_counter = 0;
    RoutingTable route_table;
    // (origin, rreq_id) -> expiry time
    std::unordered_map<std::uint64_t, SimTime> seen_rreqs;
    NeighborLedger ledger;
    std::uint32_t own_rreq_budget_used = 0;
    std::int64_t budget_interval = 0;
    std::map<NodeId, PendingDiscovery> pending_discoveries;

    NodeState() = default;
    NodeState(NodeId node, Policy p) : id(node), policy(p), route_table(node) {}

    // Brings the per-interval emission budget up to date and reports what is left.
    std::uint32_t budget_left(const PolicyParams& params, SimTime now);
    bool consume_budget(const PolicyParams& params, SimTime now);

    bool seen(NodeId origin, std::uint32_t rreq_id, SimTime now) const;
    void remember(NodeId origin, std::uint32_t rreq_id, SimTime now, const AodvParams& aodv);
    void purge_seen(SimTime now);
};

// Starts (or re-attempts) a discovery for `dest`. Returns the RREQ to
// broadcast, or nothing when this interval's budget is used up; the
// discovery then stays pending with deferred = true.
std::optional<RreqPacket> originate_discovery(NodeState& node, NodeId dest, SimTime now,
                                              const PolicyParams& params,
                                              const AodvParams& aodv);

// Why a received RREQ went no further than this node.
enum class RreqDisposition : std::uint8_t {
    PolicyDrop,
    Duplicate,
    AtDestination,
    Forwarded,
    TtlExpired,
    BudgetExhausted,
};

struct RreqOutcome {
    Verdict verdict = Verdict::Accept;
    RreqDisposition disposition = RreqDisposition::PolicyDrop;
    bool reverse_route_installed = false;
    std::optional<RreqPacket> rebroadcast;
    std::optional<RrepPacket> reply;
    NodeId reply_next_hop = kNoNode;
};

RreqOutcome handle_rreq(NodeState& node, const RreqPacket& pkt, NodeId from, SimTime now,
                        const PolicyParams& params, const AodvParams& aodv);

enum class RrepDisposition : std::uint8_t {
    RouteFormed,   // origin completed a pending discovery
    LateAtOrigin,  // origin got a reply for a discovery no longer pending
    Forwarded,
    Orphaned,      // no reverse route to forward along
};

struct RrepOutcome {
    RrepDisposition disposition = RrepDisposition::Orphaned;
    std::optional<RrepPacket> forward;
    NodeId next_hop = kNoNode;
    // Set when disposition == RouteFormed.
    std::uint32_t route_hops = 0;
    double latency = 0.0;
};

RrepOutcome handle_rrep(NodeState& node, const RrepPacket& pkt, NodeId from, SimTime now,
                        const AodvParams& aodv);

enum class TimeoutAction : std::uint8_t { NoOp, Retry, Failed };

// How long attempt number `attempt` (1-based) waits for an RREP: the base
// timeout doubled per retry, as in RFC 3561's binary exponential backoff.
SimTime rrep_wait(const AodvParams& aodv, std::uint32_t attempt) noexcept;

// Fired rrep_wait after an RREQ went out. `rreq_id` identifies the
// attempt the timer belongs to; timers of superseded or completed attempts
// are no-ops.
TimeoutAction discovery_timeout(NodeState& node, NodeId dest, std::uint32_t rreq_id,
                                SimTime now, const AodvParams& aodv);

}  // namespace manet
