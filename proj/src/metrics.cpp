#include "manet/metrics.hpp"

#include <fmt/format.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

namespace manet {

double overhead_ratio(const MetricsReport& r) noexcept {
    if (r.data_packets_sent == 0) return 0.0;
    if (r.routing_packets_sent == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(r.data_packets_sent) / static_cast<double>(r.routing_packets_sent);
}

double mean_hops(const MetricsReport& r) noexcept {
    if (r.route_records.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& rec : r.route_records) sum += rec.hops;
    return sum / static_cast<double>(r.route_records.size());
}

double mean_latency(const MetricsReport& r) noexcept {
    if (r.route_records.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& rec : r.route_records) sum += rec.latency_s;
    return sum / static_cast<double>(r.route_records.size());
}

BlacklistQuality blacklist_quality(const MetricsReport& r) {
    std::set<std::pair<NodeId, NodeId>> tp, fp;
    std::set<NodeId> accused_malicious;
    for (const auto& ev : r.blacklist_events) {
        if (ev.accused_is_malicious) {
            tp.emplace(ev.judge, ev.accused);
            accused_malicious.insert(ev.accused);
        } else {
            fp.emplace(ev.judge, ev.accused);
        }
    }
    BlacklistQuality q;
    q.true_positives = tp.size();
    q.false_positives = fp.size();
    for (NodeId m : r.malicious_nodes) {
        if (!accused_malicious.contains(m)) ++q.false_negatives;
    }
    return q;
}

namespace {

void check(std::vector<std::string>& out, std::string_view what, std::uint64_t lhs,
           std::uint64_t rhs) {
    if (lhs != rhs) out.push_back(fmt::format("{}: {} != {}", what, lhs, rhs));
}

}  // namespace

std::vector<std::string> reconcile(const MetricsReport& r) {
    std::vector<std::string> bad;
    const auto& q = r.rreq_channel;
    const auto& p = r.rrep_channel;
    const auto& d = r.data_channel;

    for (const auto* c : {&q, &p, &d}) {
        const auto name = c == &q ? "rreq" : c == &p ? "rrep" : "data";
        check(bad, fmt::format("{} offered = capacity drops + transmitted", name), c->offered,
              c->capacity_drops + c->transmitted);
        check(bad, fmt::format("{} receptions = processed + in flight", name), c->receptions,
              c->processed + c->in_flight_at_end);
    }

    check(bad, "rreq offered = originated + forwarded", q.offered,
          r.rreq_originated_genuine + r.rreq_originated_fake + r.rreq_forwarded);
    check(bad, "rreq processed = sum of dispositions", q.processed,
          r.drops.policy_avg + r.drops.policy_blacklist + r.drops.policy_naive_ral +
              r.drops.duplicate + r.rreq_at_destination + r.rreq_forwarded + r.drops.ttl +
              r.drops.budget);

    check(bad, "rrep originated = rreq at destination", r.rrep_originated, r.rreq_at_destination);
    check(bad, "rrep offered = originated + forwarded", p.offered,
          r.rrep_originated + r.rrep_forwarded);
    check(bad, "rrep transmitted = receptions + link breaks", p.transmitted,
          p.receptions + r.rrep_link_break);
    check(bad, "rrep processed = sum of dispositions", p.processed,
          r.routes_formed + r.rrep_late + r.rrep_forwarded + r.rrep_orphaned);

    check(bad, "data offered = originated + forwarded", d.offered,
          r.data_originated + r.data_forwarded);
    check(bad, "data transmitted = receptions + link breaks", d.transmitted,
          d.receptions + r.data_link_break);
    check(bad, "data processed = sum of dispositions", d.processed,
          r.data_delivered + r.data_forwarded + r.data_no_route);

    check(bad, "capacity drops", r.drops.capacity,
          q.capacity_drops + p.capacity_drops + d.capacity_drops);
    check(bad, "routing packets sent", r.routing_packets_sent, q.transmitted + p.transmitted);
    check(bad, "data packets sent", r.data_packets_sent, d.transmitted);
    check(bad, "routes formed = route records", r.routes_formed, r.route_records.size());
    if (r.routes_formed + r.routes_failed > r.routes_requested) {
        bad.push_back(fmt::format("routes formed + failed ({}) > requested ({})",
                                  r.routes_formed + r.routes_failed, r.routes_requested));
    }
    return bad;
}

const std::vector<std::string_view>& scalar_metric_names() {
    static const std::vector<std::string_view> names{
        "routes_requested",
        "routes_formed",
        "routes_failed",
        "mean_hops",
        "mean_latency_s",
        "rreq_originated_genuine",
        "rreq_originated_fake",
        "rreq_forwarded",
        "rreq_forwarded_fake",
        "rrep_originated",
        "drop_policy_avg",
        "drop_policy_blacklist",
        "drop_policy_naive_ral",
        "drop_duplicate",
        "drop_budget",
        "drop_capacity",
        "drop_ttl",
        "data_packets_sent",
        "data_delivered",
        "routing_packets_sent",
        "overhead_ratio",
        "blacklist_events",
        "blacklist_tp",
        "blacklist_fp",
        "blacklist_fn",
        "malicious_nodes",
        "route_table_peak",
    };
    return names;
}

std::vector<double> scalar_metrics(const MetricsReport& r) {
    const auto q = blacklist_quality(r);
    auto d = [](std::uint64_t v) { return static_cast<double>(v); };
    return {
        d(r.routes_requested),
        d(r.routes_formed),
        d(r.routes_failed),
        mean_hops(r),
        mean_latency(r),
        d(r.rreq_originated_genuine),
        d(r.rreq_originated_fake),
        d(r.rreq_forwarded),
        d(r.rreq_forwarded_fake),
        d(r.rrep_originated),
        d(r.drops.policy_avg),
        d(r.drops.policy_blacklist),
        d(r.drops.policy_naive_ral),
        d(r.drops.duplicate),
        d(r.drops.budget),
        d(r.drops.capacity),
        d(r.drops.ttl),
        d(r.data_packets_sent),
        d(r.data_delivered),
        d(r.routing_packets_sent),
        overhead_ratio(r),
        d(r.blacklist_events.size()),
        d(q.true_positives),
        d(q.false_positives),
        d(q.false_negatives),
        d(r.malicious_nodes.size()),
        d(r.route_table_peak),
    };
}

double t_quantile_975(std::uint64_t df) {
    if (df == 0) throw AggregationError("t quantile needs at least one degree of freedom");
    boost::math::students_t dist(static_cast<double>(df));
    return boost::math::quantile(dist, 0.975);
}

MetricSummary summarize(std::string_view name, const std::vector<double>& values) {
    const auto n = values.size();
    if (n < 2) {
        throw AggregationError(fmt::format(
            "aggregation needs at least 2 replications, got {} (confidence interval undefined)", n));
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    MetricSummary s;
    s.name = name;
    s.mean = mean;
    s.ci95 = t_quantile_975(n - 1) * sd / std::sqrt(static_cast<double>(n));
    return s;
}

std::vector<MetricSummary> aggregate(const std::vector<MetricsReport>& reports) {
    if (reports.size() < 2) {
        return {summarize("", std::vector<double>(reports.size()))};  // throws
    }
    const auto& names = scalar_metric_names();
    std::vector<std::vector<double>> columns(names.size());
    for (const auto& r : reports) {
        const auto row = scalar_metrics(r);
        for (std::size_t i = 0; i < row.size(); ++i) columns[i].push_back(row[i]);
    }
    std::vector<MetricSummary> out;
    out.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back(summarize(names[i], columns[i]));
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

}  // namespace manet
