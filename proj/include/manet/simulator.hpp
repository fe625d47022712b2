#pragma once

// One seeded simulation run: event loop, channel, mobility, AODV nodes,
// flooders and traffic, producing a MetricsReport.
//
// All randomness comes from streams keyed by (seed, stream, node), so a run
// is a pure function of (config, seed, setup).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manet/adversary.hpp"
#include "manet/aodv.hpp"
#include "manet/channel.hpp"
#include "manet/event_queue.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/scenario.hpp"

namespace manet {

// A source/destination pair. Periodic flows send at traffic.data_rate_pps
// from `start`; one-shot flows only trigger a single discovery at `start`.
struct Flow {
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    SimTime start = 0.0;
    bool one_shot = false;
};

// Replaces the seeded draws for tests and hand-built topologies.
struct SimulationSetup {
    std::optional<std::vector<Vec2>> positions;
    std::optional<std::vector<NodeId>> malicious;
    std::optional<std::vector<Flow>> flows;
};

struct TraceRecord {
    enum class Type : std::uint8_t {
        RreqVerdict,   // node judged an RREQ delivered by peer
        Transmit,      // node put a packet on the air
        CapacityDrop,  // node's bucket refused a packet
        RouteFormed,   // node completed a discovery for peer
        RouteFailed,
    };
    Type type = Type::Transmit;
    SimTime time = 0.0;
    NodeId node = kNoNode;
    NodeId peer = kNoNode;
    PacketKind kind = PacketKind::Rreq;
    bool genuine = true;
    bool forwarded = false;  // RREQ rebroadcast rather than origination
    Verdict verdict = Verdict::Accept;
    std::uint32_t value = 0;  // receivers for Transmit, hops for RouteFormed
};

using TraceSink = std::function<void(const TraceRecord&)>;

class Simulator {
public:
    // Throws ConfigError if the config does not validate.
    Simulator(const ScenarioConfig& config, std::uint64_t seed, SimulationSetup setup = {});

    void set_trace(TraceSink sink) { trace_ = std::move(sink); }

    MetricsReport run();

    const std::vector<NodeState>& nodes() const noexcept { return nodes_; }
    const std::vector<Flow>& flows() const noexcept { return flows_; }
    const std::vector<std::uint8_t>& malicious_mask() const noexcept { return malicious_; }
    const std::vector<Vec2>& initial_positions() const noexcept { return initial_positions_; }

private:
    void on_delivery(const Event& ev);
    void on_rreq(NodeId node, NodeId from, const RreqPacket& pkt);
    void on_rrep(NodeId node, NodeId from, const RrepPacket& pkt);
    void on_data(NodeId node, NodeId from, const DataPacket& pkt);
    void on_interval_tick(const Event& ev);
    void on_mobility_update(const Event& ev);
    void on_discovery_timeout(const Event& ev);
    void on_data_tick(const Event& ev);
    void on_adversary_tick(const Event& ev);

    void start_discovery(NodeId node, NodeId dest);
    void try_originate(NodeId node, NodeId dest);

    void broadcast(NodeId sender, const RreqPacket& pkt, bool forwarded);
    void unicast(NodeId sender, NodeId receiver, const Packet& pkt);
    void data_failure(NodeId at, const DataPacket& pkt);
    void note_table_size(NodeId node);
    void schedule(SimTime t, EventKind kind, NodeId node, NodeId peer = kNoNode,
                  std::uint64_t aux = 0, Packet pkt = {});
    void emit(const TraceRecord& rec) {
        if (trace_) trace_(rec);
    }
    ChannelCounters& counters(PacketKind kind);

    ScenarioConfig cfg_;
    std::uint64_t seed_;
    std::vector<Vec2> initial_positions_;
    std::unique_ptr<RandomWaypoint> mobility_;
    std::unique_ptr<Channel> channel_;
    EventQueue queue_;
    std::vector<NodeState> nodes_;
    std::vector<std::uint8_t> malicious_;
    std::vector<FloodState> flood_;
    std::vector<Rng> fake_dest_rngs_;
    std::vector<Flow> flows_;
    std::set<std::pair<NodeId, NodeId>> periodic_pairs_;
    MetricsReport report_;
    TraceSink trace_;
    bool ran_ = false;
};

// Convenience: Simulator(config, seed).run().
MetricsReport run_simulation(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace manet
