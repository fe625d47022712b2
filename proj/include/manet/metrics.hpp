#pragma once

// Per-run accounting and cross-replication aggregation.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manet/netmodel.hpp"

namespace manet {

struct RouteRecord {
    NodeId origin = kNoNode;
    NodeId dest = kNoNode;
    std::uint32_t hops = 0;
    double latency_s = 0.0;
};

struct BlacklistEvent {
    NodeId judge = kNoNode;
    NodeId accused = kNoNode;
    SimTime time = 0.0;
    bool accused_is_malicious = false;
};

struct DropCounters {
    std::uint64_t policy_avg = 0;
    std::uint64_t policy_blacklist = 0;  // blacklisted senders and the packet that triggered it
    std::uint64_t policy_naive_ral = 0;
    std::uint64_t duplicate = 0;
    std::uint64_t budget = 0;
    std::uint64_t capacity = 0;
    std::uint64_t ttl = 0;
};

// Life of one packet class on the channel.
struct ChannelCounters {
    std::uint64_t offered = 0;         // handed to the channel by a node
    std::uint64_t capacity_drops = 0;  // refused by the sender's bucket
    std::uint64_t transmitted = 0;
    std::uint64_t receptions = 0;      // deliveries scheduled (k per broadcast)
    std::uint64_t processed = 0;       // deliveries handled before the run ended
    std::uint64_t in_flight_at_end = 0;
};

struct MetricsReport {
    std::string scenario;
    std::string policy;
    std::uint64_t seed = 0;

    std::uint64_t routes_requested = 0;
    std::uint64_t routes_formed = 0;
    std::uint64_t routes_failed = 0;
    std::vector<RouteRecord> route_records;

    std::uint64_t rreq_originated_genuine = 0;
    std::uint64_t rreq_originated_fake = 0;
    std::uint64_t rreq_forwarded = 0;
    std::uint64_t rreq_forwarded_fake = 0;
    std::uint64_t rreq_at_destination = 0;
    DropCounters drops;

    std::uint64_t rrep_originated = 0;
    std::uint64_t rrep_forwarded = 0;
    std::uint64_t rrep_orphaned = 0;
    std::uint64_t rrep_late = 0;
    std::uint64_t rrep_link_break = 0;

    std::uint64_t data_originated = 0;
    std::uint64_t data_forwarded = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t data_no_route = 0;
    std::uint64_t data_link_break = 0;
    std::uint64_t data_unrouted_at_source = 0;  // generated while no route existed; never sent

    ChannelCounters rreq_channel;
    ChannelCounters rrep_channel;
    ChannelCounters data_channel;

    // Transmissions, i.e. packets that made it past the sender's bucket.
    std::uint64_t data_packets_sent = 0;
    std::uint64_t routing_packets_sent = 0;

    std::vector<BlacklistEvent> blacklist_events;
    std::vector<NodeId> malicious_nodes;
    std::uint64_t route_table_peak = 0;  // most usable entries any node held at once
};

// data / routing; 0 without data, +inf without routing traffic.
double overhead_ratio(const MetricsReport& report) noexcept;
double mean_hops(const MetricsReport& report) noexcept;
double mean_latency(const MetricsReport& report) noexcept;

struct BlacklistQuality {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;
};

// Counts distinct (judge, accused) pairs; false negatives are malicious nodes
// nobody ever blacklisted.
BlacklistQuality blacklist_quality(const MetricsReport& report);

// Packet conservation. Empty when every identity holds, otherwise one line
// per identity that does not.
std::vector<std::string> reconcile(const MetricsReport& report);

// Flat scalar view of a report, in the stable CSV column order.
const std::vector<std::string_view>& scalar_metric_names();
std::vector<double> scalar_metrics(const MetricsReport& report);

struct MetricSummary {
    std::string_view name;
    double mean = 0.0;
    double ci95 = 0.0;  // half-width
};

class AggregationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two-sided 95% Student-t quantile with `df` degrees of freedom.
double t_quantile_975(std::uint64_t df);

// Mean and 95% half-width (t, n - 1 df) per scalar metric. Needs >= 2 reports.
std::vector<MetricSummary> aggregate(const std::vector<MetricsReport>& reports);

// Same statistic over one column of values.
MetricSummary summarize(std::string_view name, const std::vector<double>& values);

// Shortest round-trip text form; "inf" / "nan" for non-finite values.
std::string format_number(double v);

}  // namespace manet
