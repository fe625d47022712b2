#pragma once

// Unit-disk broadcast channel with a per-node transmit token bucket.

#include <cstdint>
#include <span>
#include <vector>

#include "manet/mobility.hpp"
#include "manet/netmodel.hpp"

namespace manet {

struct ChannelParams {
    double range_m = 250.0;
    double prop_delay_s = 0.001;
    double capacity_pps = 200.0;   // token refill rate
    std::uint32_t queue_limit = 50;  // bucket depth
};

// Admits at most `rate` packets per second on average with bursts of up to
// `depth`. Starts full.
class TransmitBucket {
public:
    TransmitBucket() = default;
    TransmitBucket(double rate, double depth) : rate_(rate), depth_(depth), tokens_(depth) {}

    bool admit(SimTime now);
    double tokens() const noexcept { return tokens_; }

private:
    double rate_ = 0.0;
    double depth_ = 1.0;
    double tokens_ = 1.0;
    SimTime last_ = 0.0;
};

class Channel {
public:
    Channel(const ChannelParams& params, std::size_t node_count);

    const ChannelParams& params() const noexcept { return params_; }

    // Sender-side capacity check; false means the packet is dropped at the sender.
    bool admit(NodeId sender, SimTime now) { return buckets_[sender].admit(now); }

    // Nodes other than `sender` within range_m (inclusive) at `now`, in
    // increasing id order. The span is valid until the next call.
    std::span<const NodeId> receivers(NodeId sender, SimTime now, const RandomWaypoint& mobility);

    bool in_range(NodeId a, NodeId b, SimTime now, const RandomWaypoint& mobility);

    Vec2 position(NodeId node, SimTime now, const RandomWaypoint& mobility);

private:
    void refresh(SimTime now, const RandomWaypoint& mobility);

    ChannelParams params_;
    double range_sq_;
    std::vector<TransmitBucket> buckets_;
    std::vector<double> xs_, ys_;
    std::vector<NodeId> scratch_;
    SimTime cached_at_ = -1.0;
};

}  // namespace manet
