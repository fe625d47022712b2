#include "manet/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace manet {

Simulator::Simulator(const ScenarioConfig& config, std::uint64_t seed, SimulationSetup setup)
    : cfg_(config), seed_(seed) {
    if (auto issues = validate(cfg_); !issues.empty()) {
        throw ConfigError(std::move(issues));
    }
    const auto n = cfg_.node_count;

    if (setup.positions) {
        if (setup.positions->size() != n) {
            throw ConfigError(ConfigIssue{"setup.positions", "one position per node required"});
        }
        initial_positions_ = std::move(*setup.positions);
    } else {
        initial_positions_ = random_placement(n, cfg_.width_m, cfg_.height_m, seed_);
    }
    mobility_ = std::make_unique<RandomWaypoint>(cfg_.mobility(), initial_positions_, seed_);
    channel_ = std::make_unique<Channel>(cfg_.channel, n);

    nodes_.reserve(n);
    for (NodeId i = 0; i < n; ++i) nodes_.emplace_back(i, cfg_.policy);

    std::vector<NodeId> bad = setup.malicious
                                  ? std::move(*setup.malicious)
                                  : select_malicious(n, malicious_count(cfg_.adversary.malicious_fraction, n),
                                                     seed_);
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    malicious_.assign(n, 0);
    flood_.resize(n);
    for (NodeId m : bad) {
        if (m >= n) throw ConfigError(ConfigIssue{"setup.malicious", "node id out of range"});
        malicious_[m] = 1;
        nodes_[m].malicious = true;
    }
    fake_dest_rngs_.reserve(n);
    for (NodeId i = 0; i < n; ++i) fake_dest_rngs_.emplace_back(seed_, Stream::FakeDestinations, i);

    if (setup.flows) {
        flows_ = std::move(*setup.flows);
        for (const auto& f : flows_) {
            if (f.src >= n || f.dst >= n || f.src == f.dst) {
                throw ConfigError(ConfigIssue{"setup.flows", "flow endpoints must be distinct node ids"});
            }
        }
    } else {
        std::vector<NodeId> honest;
        for (NodeId i = 0; i < n; ++i) {
            if (!malicious_[i]) honest.push_back(i);
        }
        if (honest.size() >= 2) {
            Rng rng(seed_, Stream::Flows);
            const double window =
                std::max(cfg_.traffic.start_window_s, 1.0 / cfg_.traffic.data_rate_pps);
            for (std::uint32_t f = 0; f < cfg_.traffic.flow_count; ++f) {
                Flow flow;
                flow.src = honest[rng.index(honest.size())];
                do {
                    flow.dst = honest[rng.index(honest.size())];
                } while (flow.dst == flow.src);
                flow.start = rng.uniform(0.0, window);
                flows_.push_back(flow);
            }
        }
    }

    for (const auto& f : flows_) {
        if (!f.one_shot) periodic_pairs_.insert({f.src, f.dst});
    }

    report_.scenario = cfg_.name;
    report_.policy = std::string(to_string(cfg_.policy));
    report_.seed = seed_;
    report_.malicious_nodes = std::move(bad);
}

MetricsReport run_simulation(const ScenarioConfig& config, std::uint64_t seed) {
    return Simulator(config, seed).run();
}

void Simulator::schedule(SimTime t, EventKind kind, NodeId node, NodeId peer, std::uint64_t aux,
                         Packet pkt) {
    Event ev;
    ev.time = t;
    ev.kind = kind;
    ev.node = node;
    ev.peer = peer;
    ev.aux = aux;
    ev.packet = std::move(pkt);
    queue_.schedule(std::move(ev));
}

ChannelCounters& Simulator::counters(PacketKind kind) {
    switch (kind) {
        case PacketKind::Rreq: return report_.rreq_channel;
        case PacketKind::Rrep: return report_.rrep_channel;
        case PacketKind::Data: break;
    }
    return report_.data_channel;
}

MetricsReport Simulator::run() {
    if (ran_) return report_;
    ran_ = true;

    const double end = cfg_.sim_time_s;
    // First in the queue, so it precedes anything else scheduled at `end`.
    schedule(end, EventKind::SimulationEnd, kNoNode);

    if (cfg_.policy_params.interval_len < end) {
        schedule(cfg_.policy_params.interval_len, EventKind::IntervalTick, kNoNode, kNoNode, 1);
    }
    for (NodeId i = 0; i < cfg_.node_count; ++i) {
        const auto next = mobility_->next_transition(i);
        if (next < end) schedule(next, EventKind::MobilityUpdate, i);
    }
    for (std::size_t f = 0; f < flows_.size(); ++f) {
        if (flows_[f].start < end) {
            schedule(flows_[f].start, EventKind::DataTick, flows_[f].src,
                     static_cast<NodeId>(f), 0);
        }
    }
    for (NodeId m : report_.malicious_nodes) {
        if (0.0 < end) schedule(0.0, EventKind::AdversaryTick, m, kNoNode, 0);
    }

    while (!queue_.empty()) {
        const Event ev = queue_.pop();
        if (ev.kind == EventKind::SimulationEnd) break;
        switch (ev.kind) {
            case EventKind::PacketDelivery: on_delivery(ev); break;
            case EventKind::IntervalTick: on_interval_tick(ev); break;
            case EventKind::MobilityUpdate: on_mobility_update(ev); break;
            case EventKind::DiscoveryTimeout: on_discovery_timeout(ev); break;
            case EventKind::DataTick: on_data_tick(ev); break;
            case EventKind::AdversaryTick: on_adversary_tick(ev); break;
            case EventKind::SimulationEnd: break;
        }
    }

    for (const auto& ev : queue_.pending()) {
        if (ev.kind == EventKind::PacketDelivery) counters(kind_of(ev.packet)).in_flight_at_end++;
    }
    report_.routing_packets_sent = report_.rreq_channel.transmitted + report_.rrep_channel.transmitted;
    report_.data_packets_sent = report_.data_channel.transmitted;
    return report_;
}

void Simulator::on_delivery(const Event& ev) {
    counters(kind_of(ev.packet)).processed++;
    std::visit(
        [&](const auto& pkt) {
            using T = std::decay_t<decltype(pkt)>;
            if constexpr (std::is_same_v<T, RreqPacket>) {
                on_rreq(ev.node, ev.peer, pkt);
            } else if constexpr (std::is_same_v<T, RrepPacket>) {
                on_rrep(ev.node, ev.peer, pkt);
            } else {
                on_data(ev.node, ev.peer, pkt);
            }
        },
        ev.packet);
}

void Simulator::on_rreq(NodeId node, NodeId from, const RreqPacket& pkt) {
    const SimTime now = queue_.now();
    auto& st = nodes_[node];
    const auto out = handle_rreq(st, pkt, from, now, cfg_.policy_params, cfg_.aodv);

    TraceRecord rec;
    rec.type = TraceRecord::Type::RreqVerdict;
    rec.time = now;
    rec.node = node;
    rec.peer = from;
    rec.kind = PacketKind::Rreq;
    rec.genuine = pkt.genuine;
    rec.verdict = out.verdict;
    emit(rec);

    auto& drops = report_.drops;
    switch (out.verdict) {
        case Verdict::Accept: break;
        case Verdict::DropOverAvg: drops.policy_avg++; break;
        case Verdict::DropBlacklisted: drops.policy_blacklist++; break;
        case Verdict::BlacklistTriggered:
            drops.policy_blacklist++;
            report_.blacklist_events.push_back({node, from, now, malicious_[from] != 0});
            break;
        case Verdict::DropNaiveOverRal: drops.policy_naive_ral++; break;
    }
    if (out.reverse_route_installed) note_table_size(node);

    switch (out.disposition) {
        case RreqDisposition::PolicyDrop: break;
        case RreqDisposition::Duplicate: drops.duplicate++; break;
        case RreqDisposition::TtlExpired: drops.ttl++; break;
        case RreqDisposition::BudgetExhausted: drops.budget++; break;
        case RreqDisposition::AtDestination:
            report_.rreq_at_destination++;
            report_.rrep_originated++;
            unicast(node, out.reply_next_hop, *out.reply);
            break;
        case RreqDisposition::Forwarded:
            report_.rreq_forwarded++;
            if (!pkt.genuine) report_.rreq_forwarded_fake++;
            broadcast(node, *out.rebroadcast, true);
            break;
    }
}

void Simulator::on_rrep(NodeId node, NodeId from, const RrepPacket& pkt) {
    const SimTime now = queue_.now();
    const auto out = handle_rrep(nodes_[node], pkt, from, now, cfg_.aodv);
    note_table_size(node);
    switch (out.disposition) {
        case RrepDisposition::RouteFormed: {
            report_.routes_formed++;
            report_.route_records.push_back({node, pkt.dest, out.route_hops, out.latency});
            TraceRecord rec;
            rec.type = TraceRecord::Type::RouteFormed;
            rec.time = now;
            rec.node = node;
            rec.peer = pkt.dest;
            rec.kind = PacketKind::Rrep;
            rec.value = out.route_hops;
            emit(rec);
            break;
        }
        case RrepDisposition::LateAtOrigin: report_.rrep_late++; break;
        case RrepDisposition::Orphaned: report_.rrep_orphaned++; break;
        case RrepDisposition::Forwarded:
            report_.rrep_forwarded++;
            unicast(node, out.next_hop, *out.forward);
            break;
    }
}

void Simulator::on_data(NodeId node, NodeId /*from*/, const DataPacket& pkt) {
    const SimTime now = queue_.now();
    if (node == pkt.dst) {
        report_.data_delivered++;
        return;
    }
    auto& table = nodes_[node].route_table;
    if (auto route = table.lookup(pkt.dst, now)) {
        report_.data_forwarded++;
        table.refresh(pkt.dst, now, cfg_.aodv.route_lifetime);
        unicast(node, route->next_hop, pkt);
    } else {
        report_.data_no_route++;
        data_failure(node, pkt);
    }
}

void Simulator::data_failure(NodeId at, const DataPacket& pkt) {
    // Stands in for route error reporting: the broken hop and the flow's
    // source both forget the route, so the next send rediscovers it.
    nodes_[at].route_table.invalidate(pkt.dst);
    nodes_[pkt.src].route_table.invalidate(pkt.dst);
}

void Simulator::note_table_size(NodeId node) {
    report_.route_table_peak =
        std::max<std::uint64_t>(report_.route_table_peak, nodes_[node].route_table.size());
}

void Simulator::broadcast(NodeId sender, const RreqPacket& pkt, bool forwarded) {
    const SimTime now = queue_.now();
    auto& c = report_.rreq_channel;
    c.offered++;

    TraceRecord rec;
    rec.time = now;
    rec.node = sender;
    rec.kind = PacketKind::Rreq;
    rec.genuine = pkt.genuine;
    rec.forwarded = forwarded;

    if (!channel_->admit(sender, now)) {
        c.capacity_drops++;
        report_.drops.capacity++;
        rec.type = TraceRecord::Type::CapacityDrop;
        emit(rec);
        return;
    }
    c.transmitted++;
    const auto receivers = channel_->receivers(sender, now, *mobility_);
    const SimTime at = now + cfg_.channel.prop_delay_s;
    for (NodeId r : receivers) {
        schedule(at, EventKind::PacketDelivery, r, sender, 0, pkt);
    }
    c.receptions += receivers.size();
    rec.type = TraceRecord::Type::Transmit;
    rec.value = static_cast<std::uint32_t>(receivers.size());
    emit(rec);
}

void Simulator::unicast(NodeId sender, NodeId receiver, const Packet& pkt) {
    const SimTime now = queue_.now();
    const auto kind = kind_of(pkt);
    auto& c = counters(kind);
    c.offered++;

    TraceRecord rec;
    rec.time = now;
    rec.node = sender;
    rec.peer = receiver;
    rec.kind = kind;

    if (!channel_->admit(sender, now)) {
        c.capacity_drops++;
        report_.drops.capacity++;
        rec.type = TraceRecord::Type::CapacityDrop;
        emit(rec);
        return;
    }
    c.transmitted++;
    const bool reachable = channel_->in_range(sender, receiver, now, *mobility_);
    rec.type = TraceRecord::Type::Transmit;
    rec.value = reachable ? 1 : 0;
    emit(rec);

    if (reachable) {
        c.receptions++;
        schedule(now + cfg_.channel.prop_delay_s, EventKind::PacketDelivery, receiver, sender, 0,
                 pkt);
        return;
    }
    if (kind == PacketKind::Rrep) {
        report_.rrep_link_break++;
    } else if (kind == PacketKind::Data) {
        report_.data_link_break++;
        data_failure(sender, std::get<DataPacket>(pkt));
    }
}

void Simulator::start_discovery(NodeId node, NodeId dest) {
    report_.routes_requested++;
    try_originate(node, dest);
}

void Simulator::try_originate(NodeId node, NodeId dest) {
    const SimTime now = queue_.now();
    auto pkt = originate_discovery(nodes_[node], dest, now, cfg_.policy_params, cfg_.aodv);
    if (!pkt) return;  // deferred to the next interval tick
    report_.rreq_originated_genuine++;
    broadcast(node, *pkt, false);
    const auto attempt = nodes_[node].pending_discoveries.at(dest).attempts;
    schedule(now + rrep_wait(cfg_.aodv, attempt), EventKind::DiscoveryTimeout, node, dest,
             pkt->rreq_id);
}

void Simulator::on_interval_tick(const Event& ev) {
    const SimTime now = queue_.now();
    for (auto& st : nodes_) {
        st.purge_seen(now);
        for (auto& [dest, pending] : st.pending_discoveries) {
            // Periodic flows retry from their own next packet instead.
            if (pending.deferred && !periodic_pairs_.contains({st.id, dest})) {
                try_originate(st.id, dest);
            }
        }
    }
    const SimTime next = static_cast<double>(ev.aux + 1) * cfg_.policy_params.interval_len;
    if (next < cfg_.sim_time_s) schedule(next, EventKind::IntervalTick, kNoNode, kNoNode, ev.aux + 1);
}

void Simulator::on_mobility_update(const Event& ev) {
    const auto next = mobility_->advance(ev.node, queue_.now());
    if (next < cfg_.sim_time_s) schedule(next, EventKind::MobilityUpdate, ev.node);
}

void Simulator::on_discovery_timeout(const Event& ev) {
    const SimTime now = queue_.now();
    const NodeId dest = ev.peer;
    const auto rreq_id = static_cast<std::uint32_t>(ev.aux);
    switch (discovery_timeout(nodes_[ev.node], dest, rreq_id, now, cfg_.aodv)) {
        case TimeoutAction::NoOp: break;
        case TimeoutAction::Retry: try_originate(ev.node, dest); break;
        case TimeoutAction::Failed: {
            report_.routes_failed++;
            TraceRecord rec;
            rec.type = TraceRecord::Type::RouteFailed;
            rec.time = now;
            rec.node = ev.node;
            rec.peer = dest;
            emit(rec);
            break;
        }
    }
}

void Simulator::on_data_tick(const Event& ev) {
    const SimTime now = queue_.now();
    const auto& flow = flows_[ev.peer];
    auto& src = nodes_[flow.src];
    const auto route = src.route_table.lookup(flow.dst, now);
    const bool pending = src.pending_discoveries.contains(flow.dst);

    if (flow.one_shot) {
        if (!pending) start_discovery(flow.src, flow.dst);  // a probe, even with a cached route
        return;
    }

    if (route) {
        report_.data_originated++;
        src.route_table.refresh(flow.dst, now, cfg_.aodv.route_lifetime);
        DataPacket pkt;
        pkt.flow_id = ev.peer;
        pkt.src = flow.src;
        pkt.dst = flow.dst;
        pkt.size_bytes = cfg_.traffic.packet_bytes;
        unicast(flow.src, route->next_hop, pkt);
    } else {
        report_.data_unrouted_at_source++;
        if (!pending) {
            start_discovery(flow.src, flow.dst);
        } else if (src.pending_discoveries.at(flow.dst).deferred) {
            try_originate(flow.src, flow.dst);
        }
    }

    const auto k = ev.aux + 1;
    const SimTime next = flow.start + static_cast<double>(k) / cfg_.traffic.data_rate_pps;
    if (next < cfg_.sim_time_s) schedule(next, EventKind::DataTick, flow.src, ev.peer, k);
}

void Simulator::on_adversary_tick(const Event& ev) {
    const NodeId m = ev.node;
    const auto fakes = adversary_tick(nodes_[m], flood_[m], cfg_.adversary, cfg_.node_count,
                                      cfg_.aodv, fake_dest_rngs_[m]);
    for (const auto& pkt : fakes) {
        report_.rreq_originated_fake++;
        broadcast(m, pkt, false);
    }
    const auto k = ev.aux + 1;
    const SimTime next = static_cast<double>(k) * cfg_.adversary.tick_s;
    if (next < cfg_.sim_time_s) schedule(next, EventKind::AdversaryTick, m, kNoNode, k);
}

}  // namespace manet
