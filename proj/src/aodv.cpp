#include "manet/aodv.hpp"

#include <cmath>

#include <algorithm>

namespace manet {

namespace {

constexpr std::uint64_t seen_key(NodeId origin, std::uint32_t rreq_id) noexcept {
    return (static_cast<std::uint64_t>(origin) << 32) | rreq_id;
}

}  // namespace

std::uint32_t NodeState::budget_left(const PolicyParams& params, SimTime now) {
    const auto idx = interval_of(now, params);
    if (idx != budget_interval) {
        budget_interval = idx;
        own_rreq_budget_used = 0;
    }
    return params.R > own_rreq_budget_used ? params.R - own_rreq_budget_used : 0;
}

bool NodeState::consume_budget(const PolicyParams& params, SimTime now) {
    if (budget_left(params, now) == 0) {
        return false;
    }
    ++own_rreq_budget_used;
    return true;
}

bool NodeState::seen(NodeId origin, std::uint32_t rreq_id, SimTime now) const {
    auto it = seen_rreqs.find(seen_key(origin, rreq_id));
    return it != seen_rreqs.end() && now < it->second;
}

void NodeState::remember(NodeId origin, std::uint32_t rreq_id, SimTime now,
                         const AodvParams& aodv) {
    seen_rreqs.insert_or_assign(seen_key(origin, rreq_id), now + aodv.seen_expiry);
}

void NodeState::purge_seen(SimTime now) {
    std::erase_if(seen_rreqs, [now](const auto& kv) { return kv.second <= now; });
}

std::optional<RreqPacket> originate_discovery(NodeState& node, NodeId dest, SimTime now,
                                              const PolicyParams& params,
                                              const AodvParams& aodv) {
    auto [it, fresh] = node.pending_discoveries.try_emplace(dest);
    auto& pending = it->second;
    if (fresh) {
        pending.requested_at = now;
    }
    if (!node.consume_budget(params, now)) {
        pending.deferred = true;
        return std::nullopt;
    }

    node.seq_no += 1;
    node.rreq_id_counter += 1;

    RreqPacket pkt;
    pkt.rreq_id = node.rreq_id_counter;
    pkt.origin = node.id;
    pkt.origin_seq = node.seq_no;
    pkt.dest = dest;
    // Last known sequence number, even from an expired entry.
    const auto& entries = node.route_table.entries();
    if (auto known = entries.find(dest); known != entries.end()) {
        pkt.dest_seq = known->second.dest_seq;
    }
    pkt.hop_count = 0;
    pkt.ttl = aodv.initial_ttl;
    pkt.genuine = true;

    node.remember(node.id, pkt.rreq_id, now, aodv);
    pending.attempts += 1;
    pending.last_rreq_id = pkt.rreq_id;
    pending.deferred = false;
    return pkt;
}

RreqOutcome handle_rreq(NodeState& node, const RreqPacket& pkt, NodeId from, SimTime now,
                        const PolicyParams& params, const AodvParams& aodv) {
    RreqOutcome out;
    out.verdict = admit_rreq(node.policy, node.ledger, params, from, now);
    if (!admits(out.verdict)) {
        out.disposition = RreqDisposition::PolicyDrop;
        return out;
    }
    if (pkt.origin == node.id || node.seen(pkt.origin, pkt.rreq_id, now)) {
        out.disposition = RreqDisposition::Duplicate;
        return out;
    }
    node.remember(pkt.origin, pkt.rreq_id, now, aodv);

    RoutingTableEntry reverse;
    reverse.dest = pkt.origin;
    reverse.next_hop = from;
    reverse.hop_count = pkt.hop_count + 1;
    reverse.dest_seq = pkt.origin_seq;
    out.reverse_route_installed = node.route_table.update(reverse, now, aodv.route_lifetime);

    if (pkt.dest == node.id) {
        node.seq_no = std::max(node.seq_no, pkt.dest_seq) + 1;
        RrepPacket reply;
        reply.origin = pkt.origin;
        reply.dest = node.id;
        reply.dest_seq = node.seq_no;
        reply.hop_count = 0;
        out.reply = reply;
        out.reply_next_hop = from;
        out.disposition = RreqDisposition::AtDestination;
        return out;
    }
    if (pkt.ttl <= 1) {
        out.disposition = RreqDisposition::TtlExpired;
        return out;
    }
    if (!node.consume_budget(params, now)) {
        out.disposition = RreqDisposition::BudgetExhausted;
        return out;
    }
    out.rebroadcast = pkt.rebroadcast();
    out.disposition = RreqDisposition::Forwarded;
    return out;
}

RrepOutcome handle_rrep(NodeState& node, const RrepPacket& pkt, NodeId from, SimTime now,
                        const AodvParams& aodv) {
    RrepOutcome out;

    RoutingTableEntry forward;
    forward.dest = pkt.dest;
    forward.next_hop = from;
    forward.hop_count = pkt.hop_count + 1;
    forward.dest_seq = pkt.dest_seq;
    node.route_table.update(forward, now, aodv.route_lifetime);

    if (pkt.origin == node.id) {
        auto it = node.pending_discoveries.find(pkt.dest);
        if (it == node.pending_discoveries.end()) {
            out.disposition = RrepDisposition::LateAtOrigin;
            return out;
        }
        out.disposition = RrepDisposition::RouteFormed;
        out.route_hops = forward.hop_count;
        out.latency = now - it->second.requested_at;
        node.pending_discoveries.erase(it);
        return out;
    }

    auto reverse = node.route_table.lookup(pkt.origin, now);
    if (!reverse) {
        out.disposition = RrepDisposition::Orphaned;
        return out;
    }
    node.route_table.refresh(pkt.origin, now, aodv.route_lifetime);
    RrepPacket next = pkt;
    next.hop_count += 1;
    out.forward = next;
    out.next_hop = reverse->next_hop;
    out.disposition = RrepDisposition::Forwarded;
    return out;
}

SimTime rrep_wait(const AodvParams& aodv, std::uint32_t attempt) noexcept {
    return std::ldexp(aodv.discovery_timeout, static_cast<int>(attempt > 0 ? attempt - 1 : 0));
}

TimeoutAction discovery_timeout(NodeState& node, NodeId dest, std::uint32_t rreq_id,
                                SimTime /*now*/, const AodvParams& aodv) {
    auto it = node.pending_discoveries.find(dest);
    if (it == node.pending_discoveries.end()) {
        return TimeoutAction::NoOp;
    }
    const auto& pending = it->second;
    if (pending.deferred || pending.last_rreq_id != rreq_id) {
        return TimeoutAction::NoOp;
    }
    if (pending.attempts < 1 + aodv.rreq_retries) {
        return TimeoutAction::Retry;
    }
    node.pending_discoveries.erase(it);
    return TimeoutAction::Failed;
}

}  // namespace manet
